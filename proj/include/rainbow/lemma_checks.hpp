#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rainbow/graph.hpp"
#include "rainbow/model.hpp"
#include "rainbow/rng.hpp"

namespace rainbow {

/// Outcome of a lemma validation batch. Margins are in the lemma's own
/// units; worst_margin is the minimum slack seen (negative on violation).
struct CheckReport {
    std::string lemma_id;
    long instances_checked = 0;
    long violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    long hypothesis_violations = 0;

    void fold(double margin) {
        ++instances_checked;
        if (margin < 0.0) ++violations;
        if (margin < worst_margin) worst_margin = margin;
    }

    void merge(const CheckReport& other) {
        instances_checked += other.instances_checked;
        violations += other.violations;
        hypothesis_violations += other.hypothesis_violations;
        if (other.worst_margin < worst_margin) worst_margin = other.worst_margin;
    }

    double violation_frequency() const {
        return instances_checked == 0 ? 0.0
                                      : static_cast<double>(violations) / instances_checked;
    }
};

struct CutPolicy {
    enum class Mode { exhaustive, sampled };
    Mode mode = Mode::exhaustive;
    int samples = 0;        // sampled mode only
    std::uint64_t seed = 0;  // sampled mode only

    static CutPolicy exhaustive() { return {Mode::exhaustive, 0, 0}; }
    static CutPolicy sampled(int samples, std::uint64_t seed) {
        return {Mode::sampled, samples, seed};
    }
};

/// Checks that the kept edge set covers at most half of each inspected
/// edge-cut. Cuts come from all 2^(n-1)-1 proper bipartitions
/// (exhaustive, n <= 20) or from uniformly sampled bipartitions. One
/// instance per cut; margin = |S|/2 - |kept in S|.
inline CheckReport check_cut_sparsity(const Graph& g, const std::vector<int>& kept,
                                      const CutPolicy& policy) {
    int n = g.vertex_count();
    CheckReport report;
    report.lemma_id = "cuts";

    std::vector<char> in_kept(g.edge_count(), 0);
    for (int e : kept) in_kept[e] = 1;

    auto inspect = [&](const std::vector<char>& side) {
        long cut_size = 0, kept_in = 0;
        for (int e = 0; e < g.edge_count(); ++e) {
            auto [u, v] = g.edge(e);
            if (side[u] != side[v]) {
                ++cut_size;
                kept_in += in_kept[e];
            }
        }
        report.fold(cut_size / 2.0 - static_cast<double>(kept_in));
    };

    if (policy.mode == CutPolicy::Mode::exhaustive) {
        if (n > 20) {
            throw std::invalid_argument("check_cut_sparsity: exhaustive limited to n <= 20");
        }
        std::vector<char> side(n, 0);
        // vertex 0 fixed on side 0; masks over the remaining n-1 vertices
        for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
            for (int v = 1; v < n; ++v) side[v] = (mask >> (v - 1)) & 1u;
            inspect(side);
        }
    } else {
        RandomStream rng(policy.seed, derive_stream_id(policy.seed, 0, 0));
        std::vector<char> side(n, 0);
        for (int s = 0; s < policy.samples; ++s) {
            bool nontrivial = false;
            do {
                nontrivial = false;
                for (int v = 0; v < n; ++v) {
                    side[v] = static_cast<char>(rng.next_u64() & 1u);
                    if (side[v] != side[0]) nontrivial = true;
                }
            } while (!nontrivial);
            inspect(side);
        }
    }
    if (report.instances_checked == 0) report.worst_margin = 0.0;
    return report;
}

/// Counts edges outside the excluded set that join distinct blocks of the
/// partition; margin = count - lambda*t/4 with lambda measured on g. The
/// half-cut hypothesis is re-checked on each block boundary and recorded
/// in hypothesis_violations.
inline CheckReport check_straddle(const Graph& g, const std::vector<int>& excluded,
                                  const VertexPartition& partition) {
    if (partition.block_count < 2) {
        throw std::invalid_argument("check_straddle: need at least 2 blocks");
    }
    CheckReport report;
    report.lemma_id = "straddle";

    std::vector<char> is_excluded(g.edge_count(), 0);
    for (int e : excluded) is_excluded[e] = 1;

    long crossing = 0;
    for (int e = 0; e < g.edge_count(); ++e) {
        auto [u, v] = g.edge(e);
        if (partition.label[u] != partition.label[v] && !is_excluded[e]) ++crossing;
    }

    // hypothesis: each block boundary holds at most half its edges excluded
    for (const auto& block : partition.blocks()) {
        std::vector<char> in_block(g.vertex_count(), 0);
        for (int v : block) in_block[v] = 1;
        long boundary = 0, excluded_on_boundary = 0;
        for (int e = 0; e < g.edge_count(); ++e) {
            auto [u, v] = g.edge(e);
            if (in_block[u] != in_block[v]) {
                ++boundary;
                excluded_on_boundary += is_excluded[e];
            }
        }
        if (2 * excluded_on_boundary > boundary) ++report.hypothesis_violations;
    }

    int lambda = edge_connectivity(g);
    double target = lambda * static_cast<double>(partition.block_count) / 4.0;
    report.fold(static_cast<double>(crossing) - target);
    return report;
}

/// Counts vertices incident to at least one kept edge colored from K;
/// margin = count - |K| * ln(n) / omega. Requires
/// |K| <= n / (omega * ln n).
inline CheckReport check_color_hit(const ColoredSubgraph& gp, const std::vector<int>& color_set,
                                   double omega_value) {
    const Graph& host = gp.host();
    double n = host.vertex_count();
    double log_n = std::log(n);
    if (static_cast<double>(color_set.size()) > n / (omega_value * log_n)) {
        throw std::invalid_argument("check_color_hit: |K| exceeds n/(omega*ln n)");
    }
    CheckReport report;
    report.lemma_id = "colorhit";

    std::vector<char> in_k(gp.palette_size() + 1, 0);
    for (int c : color_set) in_k[c] = 1;

    std::vector<char> hit(host.vertex_count(), 0);
    for (int e : gp.kept()) {
        if (in_k[gp.color_of(e)]) {
            auto [u, v] = host.edge(e);
            hit[u] = 1;
            hit[v] = 1;
        }
    }
    long count = 0;
    for (char h : hit) count += h;

    double target = static_cast<double>(color_set.size()) * log_n / omega_value;
    report.fold(static_cast<double>(count) - target);
    return report;
}

}  // namespace rainbow
