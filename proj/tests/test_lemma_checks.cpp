#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>

#include "doctest.h"
#include "rainbow/engine.hpp"
#include "rainbow/lemma_checks.hpp"

using namespace rainbow;

namespace {

std::shared_ptr<const Graph> make_host(const HostSpec& spec) {
    return std::make_shared<const Graph>(build_host(spec));
}

// restricted-growth-string enumeration of all set partitions of 0..n-1
template <typename Fn>
void for_each_partition(int n, Fn&& fn) {
    std::vector<int> label(n, 0);
    std::function<void(int, int)> go = [&](int v, int max_used) {
        if (v == n) {
            VertexPartition part;
            part.label = label;
            part.block_count = max_used + 1;
            // canonicalize: label by minimum vertex of each block
            std::vector<int> min_of(max_used + 1, n);
            for (int x = 0; x < n; ++x) min_of[label[x]] = std::min(min_of[label[x]], x);
            for (int x = 0; x < n; ++x) part.label[x] = min_of[label[x]];
            fn(part);
            return;
        }
        for (int b = 0; b <= max_used + 1; ++b) {
            label[v] = b;
            go(v + 1, std::max(max_used, b));
        }
        label[v] = 0;
    };
    label[0] = 0;
    go(1, 0);
}

}  // namespace

TEST_SUITE_BEGIN("lemma_checks");

TEST_CASE("cut sparsity: empty kept set has margin min|S|/2") {
    Graph k4 = build_host(HostSpec::complete(4));
    auto report = check_cut_sparsity(k4, {}, CutPolicy::exhaustive());
    CHECK(report.instances_checked == 7);  // 2^3 - 1 bipartitions
    CHECK(report.violations == 0);
    CHECK(report.worst_margin == doctest::Approx(1.5));  // min cut 3, halved
}

TEST_CASE("cut sparsity: keeping everything violates every cut") {
    Graph k4 = build_host(HostSpec::complete(4));
    std::vector<int> all(k4.edge_count());
    std::iota(all.begin(), all.end(), 0);
    auto report = check_cut_sparsity(k4, all, CutPolicy::exhaustive());
    CHECK(report.violations == report.instances_checked);
    CHECK(report.worst_margin < 0);
}

TEST_CASE("cut sparsity: exhaustive guard and sampled determinism") {
    Graph big = build_host(HostSpec::circulant(24, {1, 2}));
    CHECK_THROWS_AS(check_cut_sparsity(big, {}, CutPolicy::exhaustive()), std::invalid_argument);

    std::vector<int> kept{0, 3, 5, 7};
    auto a = check_cut_sparsity(big, kept, CutPolicy::sampled(50, 11));
    auto b = check_cut_sparsity(big, kept, CutPolicy::sampled(50, 11));
    CHECK(a.instances_checked == 50);
    CHECK(a.violations == b.violations);
    CHECK(a.worst_margin == b.worst_margin);
}

TEST_CASE("straddle: singleton partition of K_n counts every edge") {
    Graph k6 = build_host(HostSpec::complete(6));
    VertexPartition singletons{{0, 1, 2, 3, 4, 5}, 6};
    auto report = check_straddle(k6, {}, singletons);
    CHECK(report.violations == 0);
    // 15 crossing edges vs lambda*t/4 = 5*6/4 = 7.5
    CHECK(report.worst_margin == doctest::Approx(15.0 - 7.5));
    CHECK(report.hypothesis_violations == 0);
}

TEST_CASE("straddle: two halves of K8 with nothing excluded") {
    Graph k8 = build_host(HostSpec::complete(8));
    VertexPartition halves{{0, 0, 0, 0, 4, 4, 4, 4}, 2};
    auto report = check_straddle(k8, {}, halves);
    // 16 crossing edges vs 7*2/4 = 3.5
    CHECK(report.worst_margin == doctest::Approx(16.0 - 3.5));
    CHECK(report.violations == 0);

    VertexPartition trivial{{0, 0, 0, 0, 0, 0, 0, 0}, 1};
    CHECK_THROWS_AS(check_straddle(k8, {}, trivial), std::invalid_argument);
}

TEST_CASE("straddle with nothing excluded never violates (exhaustive small hosts)") {
    std::vector<HostSpec> hosts{HostSpec::complete(5), HostSpec::complete(6),
                                HostSpec::circulant_consecutive(7, 2),
                                HostSpec::circulant_consecutive(8, 3)};
    for (const auto& spec : hosts) {
        Graph g = build_host(spec);
        long violations = 0;
        for_each_partition(g.vertex_count(), [&](const VertexPartition& part) {
            if (part.block_count < 2) return;
            auto report = check_straddle(g, {}, part);
            violations += report.violations;
        });
        CHECK(violations == 0);
    }
}

TEST_CASE("straddle: excluded edges are discounted; hypothesis recorded") {
    Graph k4 = build_host(HostSpec::complete(4));
    VertexPartition split{{0, 0, 2, 2}, 2};  // cut {02,03,12,13}, 4 edges
    // exclude three of the four crossing edges: hypothesis 2*3 > 4 fails
    std::vector<int> excluded;
    for (int e = 0; e < k4.edge_count(); ++e) {
        auto [u, v] = k4.edge(e);
        if (split.label[u] != split.label[v]) excluded.push_back(e);
        if (excluded.size() == 3) break;
    }
    auto report = check_straddle(k4, excluded, split);
    CHECK(report.hypothesis_violations == 2);  // both block boundaries equal the cut
    // one crossing edge left vs 3*2/4
    CHECK(report.worst_margin == doctest::Approx(1.0 - 1.5));
    CHECK(report.violations == 1);
}

TEST_CASE("color hit: full palette covers all non-isolated vertices") {
    auto host = make_host(HostSpec::complete(6));
    RandomStream rng(5, 5);
    auto kept = sample_subgraph(*host, 0.9, rng);
    auto gp = color_uniform(host, kept, 3, rng);
    // palette 3 on K6 with q=0.9: no isolated vertices expected here
    std::vector<char> touched(6, 0);
    for (int e : gp.kept()) {
        auto [u, v] = host->edge(e);
        touched[u] = touched[v] = 1;
    }
    bool none_isolated = std::all_of(touched.begin(), touched.end(), [](char c) { return c; });
    REQUIRE(none_isolated);
    auto report = check_color_hit(gp, {1, 2, 3}, 1.0);
    double target = 3.0 * std::log(6.0);
    CHECK(report.worst_margin == doctest::Approx(6.0 - target));
    CHECK(report.violations == 0);
}

TEST_CASE("color hit: absent color counts zero vertices, recorded not thrown") {
    auto host = make_host(HostSpec::complete(6));
    ColoredSubgraph gp(host, 5, {LayerKind::p_layer, 0});
    gp.set_color(0, 1);
    auto report = check_color_hit(gp, {4}, 1.0);
    CHECK(report.violations == 1);
    CHECK(report.worst_margin < 0);
}

TEST_CASE("color hit: size bound enforced") {
    auto host = make_host(HostSpec::complete(16));
    ColoredSubgraph gp(host, 15, {LayerKind::p_layer, 0});
    gp.set_color(0, 1);
    // n/(omega ln n) = 16/(4 * 2.77) = 1.44: |K| = 2 exceeds it
    CHECK_THROWS_AS(check_color_hit(gp, {1, 2}, 4.0), std::invalid_argument);
    CHECK_NOTHROW(check_color_hit(gp, {1}, 4.0));
}

TEST_CASE("cut sparsity under sampled percolation: frequency tracks the p regime") {
    // circulant(16, 1..4): the dense-layer p at epsilon 0.5 is about 0.78,
    // far past ln^2(n)/n, so nearly every sampled cut keeps more than half
    // its edges; thinning p well below 1/2 drives the frequency to zero
    auto host = make_host(HostSpec::circulant_consecutive(16, 4));
    ModelParams params{16, 8, 0.5, std::nullopt};
    double dense_p = params.p_layer_probability();
    CHECK(dense_p > std::log(16.0) * std::log(16.0) / 16.0);

    auto run = [&](double p, std::uint64_t seed) {
        CheckReport total;
        for (int trial = 0; trial < 20; ++trial) {
            RandomStream rng(seed, derive_stream_id(seed, trial, 0));
            auto kept = sample_subgraph(*host, p, rng);
            total.merge(check_cut_sparsity(
                *host, kept, CutPolicy::sampled(100, derive_stream_id(seed, trial, 1))));
        }
        return total;
    };

    auto hot = run(dense_p, 41);
    CHECK(hot.instances_checked == 2000);
    CHECK(hot.violation_frequency() > 0.9);

    auto cold = run(0.1, 42);
    CHECK(cold.violation_frequency() < 0.05);
}

TEST_CASE("checkers do not mutate inputs and reports are reproducible") {
    auto host = make_host(HostSpec::circulant_consecutive(16, 4));
    RandomStream rng(21, 0);
    auto kept = sample_subgraph(*host, 0.2, rng);
    auto before = kept;
    auto r1 = check_cut_sparsity(*host, kept, CutPolicy::exhaustive());
    auto r2 = check_cut_sparsity(*host, kept, CutPolicy::exhaustive());
    CHECK(kept == before);
    CHECK(r1.violations == r2.violations);
    CHECK(r1.worst_margin == r2.worst_margin);
    CHECK(r1.instances_checked == (1 << 15) - 1);
}

TEST_SUITE_END();
