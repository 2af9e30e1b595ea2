#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rainbow/forest.hpp"
#include "rainbow/model.hpp"

namespace rainbow {

/// Colored edge pool the exchange search runs over: the dense layer plus
/// every edge that ever belonged to a working forest. Edges are never
/// removed; per-color buckets stay sorted ascending.
class ColoredEdgePool {
public:
    ColoredEdgePool(int host_edge_count, int palette)
        : color_by_edge_(host_edge_count, 0), buckets_(palette + 1) {}

    static ColoredEdgePool from_subgraph(const ColoredSubgraph& cg) {
        ColoredEdgePool pool(cg.host().edge_count(), cg.palette_size());
        for (int e : cg.kept()) pool.add(e, cg.color_of(e));
        return pool;
    }

    void add(int edge, int color) {
        if (color < 1 || color >= static_cast<int>(buckets_.size())) {
            throw std::invalid_argument("ColoredEdgePool: color outside palette");
        }
        int& slot = color_by_edge_[edge];
        if (slot == color) return;
        if (slot != 0) throw std::invalid_argument("ColoredEdgePool: conflicting color");
        slot = color;
        auto& b = buckets_[color];
        b.insert(std::upper_bound(b.begin(), b.end(), edge), edge);
        ++size_;
    }

    bool contains(int e) const { return color_by_edge_[e] != 0; }
    int color_of(int e) const { return color_by_edge_[e]; }
    int size() const { return size_; }
    int palette_size() const { return static_cast<int>(buckets_.size()) - 1; }

    const std::vector<int>& edges_with_color(int c) const { return buckets_[c]; }

private:
    std::vector<int> color_by_edge_;
    std::vector<std::vector<int>> buckets_;
    int size_ = 0;
};

/// True iff f + e has a cycle through r, i.e. r lies on the unique f-path
/// between e's endpoints.
inline bool is_replaceable(const RainbowForest& f, int r, int e) {
    if (!f.has_edge(r)) throw std::invalid_argument("is_replaceable: r not in forest");
    if (f.has_edge(e)) throw std::invalid_argument("is_replaceable: e already in forest");
    auto [u, v] = f.view().host().edge(e);
    if (!f.same_component(u, v)) return false;
    auto path = f.tree_path_edges(u, v);
    return std::binary_search(path.begin(), path.end(), r);
}

struct InitialForestStats {
    int matched_vertices = 0;
    int cycles_broken = 0;
};

namespace detail {

// Kuhn's augmenting-path matcher: left side are vertices, right side the
// colors they can reach through an incident kept edge.
class VertexColorMatcher {
public:
    VertexColorMatcher(int n, int palette) : adj_(n), match_left_(n, -1), match_right_(palette + 1, -1) {}

    void add_option(int v, int color) { adj_[v].push_back(color); }

    int solve() {
        int matched = 0;
        std::vector<int> stamp(match_right_.size(), -1);
        for (int v = 0; v < static_cast<int>(adj_.size()); ++v) {
            if (try_augment(v, stamp, v)) ++matched;
        }
        return matched;
    }

    int color_of_vertex(int v) const { return match_left_[v]; }

private:
    bool try_augment(int v, std::vector<int>& stamp, int round) {
        for (int c : adj_[v]) {
            if (stamp[c] == round) continue;
            stamp[c] = round;
            if (match_right_[c] < 0 || try_augment(match_right_[c], stamp, round)) {
                match_right_[c] = v;
                match_left_[v] = c;
                return true;
            }
        }
        return false;
    }

    std::vector<std::vector<int>> adj_;
    std::vector<int> match_left_;
    std::vector<int> match_right_;
};

}  // namespace detail

/// Builds the starting rainbow forest on a dense-layer subgraph: match
/// vertices to colors of incident kept edges, point one matched-color
/// edge out of each matched vertex, then break each cycle of the
/// resulting functional graph by dropping its highest-indexed edge.
inline RainbowForest build_initial_forest(std::shared_ptr<const ColoredSubgraph> gp,
                                          InitialForestStats* stats = nullptr) {
    const Graph& host = gp->host();
    int n = host.vertex_count();
    detail::VertexColorMatcher matcher(n, gp->palette_size());
    for (int v = 0; v < n; ++v) {
        std::vector<int> colors;
        for (auto [w, e] : host.neighbors(v)) {
            (void)w;
            if (gp->contains(e)) colors.push_back(gp->color_of(e));
        }
        std::sort(colors.begin(), colors.end());
        colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
        for (int c : colors) matcher.add_option(v, c);
    }
    int matched = matcher.solve();

    // successor edge per matched vertex: the lowest-indexed incident kept
    // edge bearing the matched color
    std::vector<int> out_edge(n, -1), successor(n, -1);
    for (int v = 0; v < n; ++v) {
        int c = matcher.color_of_vertex(v);
        if (c < 0) continue;
        for (auto [w, e] : host.neighbors(v)) {
            if (gp->contains(e) && gp->color_of(e) == c && (out_edge[v] < 0 || e < out_edge[v])) {
                out_edge[v] = e;
                successor[v] = w;
            }
        }
    }

    // functional-graph cycle detection; each directed cycle loses one edge
    std::vector<char> state(n, 0);  // 0 unseen, 1 on stack, 2 done
    std::vector<bool> dropped(host.edge_count(), false);
    int cycles = 0;
    for (int start = 0; start < n; ++start) {
        if (state[start] != 0) continue;
        std::vector<int> chain;
        int x = start;
        while (x >= 0 && state[x] == 0) {
            state[x] = 1;
            chain.push_back(x);
            x = successor[x];
        }
        if (x >= 0 && state[x] == 1) {
            // found a new cycle: x .. chain.back()
            ++cycles;
            int worst = -1;
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                worst = std::max(worst, out_edge[*it]);
                if (*it == x) break;
            }
            dropped[worst] = true;
        }
        for (int y : chain) state[y] = 2;
    }

    RainbowForest forest(std::move(gp));
    std::vector<int> chosen;
    for (int v = 0; v < n; ++v) {
        if (out_edge[v] >= 0 && !dropped[out_edge[v]]) chosen.push_back(out_edge[v]);
    }
    std::sort(chosen.begin(), chosen.end());
    for (int e : chosen) forest.add_edge(e);
    if (stats != nullptr) {
        stats->matched_vertices = matched;
        stats->cycles_broken = cycles;
    }
    return forest;
}

/// Repeatedly adds the first pool edge (ascending index) whose color is
/// unused and whose endpoints lie in distinct components. A single
/// ascending pass reaches the fixed point: both rejection reasons are
/// monotone under later additions.
inline RainbowForest greedy_augment(RainbowForest f, const ColoredEdgePool& pool) {
    const int m = static_cast<int>(f.view().host().edge_count());
    for (int e = 0; e < m; ++e) {
        if (!pool.contains(e) || f.has_edge(e)) continue;
        int c = pool.color_of(e);
        if (f.uses_color(c)) continue;
        auto [u, v] = f.view().host().edge(e);
        if (!f.same_component(u, v)) f.add_edge(e);
    }
    return f;
}

struct ExchangeDelta {
    int removed_edge;
    int added_edge;
};

/// One color of the set J, together with the exchange sequence that
/// rebuilds its witness forest from the root forest.
struct ColorWitness {
    int color = 0;
    std::vector<ExchangeDelta> deltas;
};

struct SearchStats {
    int nodes_expanded = 0;
    int colors_visited = 0;
};

struct ReplacementSearchResult {
    bool augmented = false;
    std::optional<RainbowForest> forest;  // set when augmented
    std::vector<ColorWitness> color_set;  // BFS discovery order; root color first
    SearchStats stats;

    const ColorWitness* find(int color) const {
        for (const auto& w : color_set) {
            if (w.color == color) return &w;
        }
        return nullptr;
    }
};

/// Replays an exchange sequence (remove, then add, per step) on a copy of
/// the root forest.
inline RainbowForest materialize_witness(const RainbowForest& f_star,
                                         const std::vector<ExchangeDelta>& deltas) {
    RainbowForest f = f_star;
    for (const auto& d : deltas) {
        f.remove_edge(d.removed_edge);
        f.add_edge(d.added_edge);
    }
    return f;
}

namespace detail {

inline void verify_exchange_state(const RainbowForest& root, const RainbowForest& node,
                                  int sigma, int missing) {
    node.validate();
    if (node.canonical_partition() != root.canonical_partition()) {
        throw std::logic_error("exchange state changed the vertex partition");
    }
    std::vector<int> expect = root.used_colors();
    expect.push_back(sigma);
    std::sort(expect.begin(), expect.end());
    expect.erase(std::remove(expect.begin(), expect.end(), missing), expect.end());
    if (node.used_colors() != expect) {
        throw std::logic_error("exchange state has the wrong color set");
    }
}

}  // namespace detail

/// Breadth-first search over single-edge exchanges from f_star, seeded
/// with the missing color sigma. Expanding a node (F, j) scans the pool
/// edges of color j in ascending order: an edge joining two components
/// ends the search with an augmented forest; otherwise each cycle edge r
/// with an unvisited color phi(r) spawns the child (F + e - r, phi(r)).
/// Every color is visited at most once, so at most palette+1 states are
/// ever expanded. When the queue drains, the visited colors form J, each
/// carrying a replayable witness.
inline ReplacementSearchResult replacement_color_set(const RainbowForest& f_star, int sigma,
                                                     const ColoredEdgePool& pool) {
    if (sigma < 1 || sigma > f_star.view().palette_size()) {
        throw std::invalid_argument("replacement_color_set: sigma outside palette");
    }
    if (f_star.uses_color(sigma)) {
        throw std::invalid_argument("replacement_color_set: sigma already used by the forest");
    }

    // One node of the search: a forest reachable from f_star by the delta
    // chain through its parent, missing exactly missing_color out of
    // colors(f_star) + sigma, and partitioning the vertices like f_star.
    struct ExchangeState {
        int missing_color;
        int parent;  // index into nodes, -1 at root
        ExchangeDelta delta{-1, -1};
    };

    ReplacementSearchResult result;
    std::vector<ExchangeState> nodes;
    nodes.push_back({sigma, -1});
    std::vector<bool> visited(f_star.view().palette_size() + 1, false);
    visited[sigma] = true;

    auto deltas_of = [&](int idx) {
        std::vector<ExchangeDelta> out;
        for (int at = idx; at > 0; at = nodes[at].parent) out.push_back(nodes[at].delta);
        std::reverse(out.begin(), out.end());
        return out;
    };

#ifndef NDEBUG
    constexpr int kVerifyEvery = 8;
#else
    constexpr int kVerifyEvery = 0;
#endif

    std::deque<int> queue{0};
    while (!queue.empty()) {
        int idx = queue.front();
        queue.pop_front();
        ++result.stats.nodes_expanded;

        RainbowForest f = materialize_witness(f_star, deltas_of(idx));
        if (kVerifyEvery > 0 && result.stats.nodes_expanded % kVerifyEvery == 0) {
            detail::verify_exchange_state(f_star, f, sigma, nodes[idx].missing_color);
        }
        int j = nodes[idx].missing_color;
        for (int e : pool.edges_with_color(j)) {
            if (f.has_edge(e)) continue;
            auto [u, v] = f.view().host().edge(e);
            if (!f.same_component(u, v)) {
                f.add_edge(e);
                result.augmented = true;
                result.forest = std::move(f);
                result.stats.colors_visited = static_cast<int>(nodes.size());
                return result;
            }
            for (int r : f.tree_path_edges(u, v)) {
                int rc = f.color_of(r);
                if (visited[rc]) continue;
                visited[rc] = true;
                nodes.push_back({rc, idx, {r, e}});
                queue.push_back(static_cast<int>(nodes.size()) - 1);
            }
        }
    }

    result.stats.colors_visited = static_cast<int>(nodes.size());
    result.color_set.reserve(nodes.size());
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        result.color_set.push_back({nodes[i].missing_color, deltas_of(i)});
    }
    return result;
}

enum class StuckReason { none, layer_range_exhausted, no_sparse_edge, colors_exhausted };

inline const char* stuck_reason_name(StuckReason r) {
    switch (r) {
        case StuckReason::none: return "-";
        case StuckReason::layer_range_exhausted: return "layer_range_exhausted";
        case StuckReason::no_sparse_edge: return "no_sparse_edge_in_J";
        case StuckReason::colors_exhausted: return "colors_exhausted";
    }
    return "?";
}

struct TraceRow {
    int t = 0;
    std::string action;   // greedy | exchange | exchange+layer
    int sigma = -1;
    int j_count = -1;
    int chosen_j = -1;
};

struct DriverResult {
    bool success = false;
    std::optional<RainbowForest> forest;  // spanning tree on success, best forest otherwise
    std::shared_ptr<const ColoredSubgraph> flattened;

    StuckReason stuck = StuckReason::none;
    int stuck_t = 0;
    int stuck_j_count = -1;
    int stuck_missing_colors = 0;

    int initial_forest_size = 0;
    int missing_after_initial = 0;
    int iterations = 0;
    int max_j_seen = 0;
    bool pool_recovered = false;  // sparse layers absorbed after a stalled step
    std::vector<int> layers_consumed;
    std::vector<TraceRow> trace;
};

/// The component-connecting loop: grow the initial dense-layer forest one
/// edge per iteration, first by augmentation inside the carried pool
/// (greedy, then exchange BFS seeded at a missing color), else by
/// installing a witness forest for some j in J and adding a fresh sparse
/// edge of color j that crosses two components.
///
/// Two desk-scale provisions beyond the formal loop, both recorded:
///  - every missing color is tried as sigma (ascending) rather than only
///    the smallest, since a color absent from the dense layer yields the
///    degenerate J = {sigma};
///  - if no sigma makes progress, the remaining sparse layers are
///    absorbed into the carried pool once (pool_recovered) and the
///    exchange search resumes there. At realistic n some palette color
///    misses the dense layer entirely, and its sparse copies land inside
///    components, where only an exchange can spend them.
inline DriverResult connect_forest_components(const ExposureStack& stack) {
    DriverResult out;
    auto flat = std::make_shared<const ColoredSubgraph>(flatten(stack));
    out.flattened = flat;

    const Graph& host = *stack.host;
    auto p_view = std::make_shared<const ColoredSubgraph>(stack.p_layer());
    RainbowForest f0 = build_initial_forest(p_view);
    out.initial_forest_size = f0.size();

    // rebased onto the flattened view; dense-layer colors are identical there
    RainbowForest f(flat, f0.edges());
    out.missing_after_initial = static_cast<int>(f.missing_colors().size());

    ColoredEdgePool pool(host.edge_count(), stack.palette);
    for (int e : stack.p_layer().kept()) pool.add(e, flat->color_of(e));
    for (int e : f.edges()) pool.add(e, flat->color_of(e));

    auto first_greedy_edge = [&]() -> int {
        for (int e = 0; e < host.edge_count(); ++e) {
            if (!pool.contains(e) || f.has_edge(e)) continue;
            if (f.uses_color(pool.color_of(e))) continue;
            auto [u, v] = host.edge(e);
            if (!f.same_component(u, v)) return e;
        }
        return -1;
    };

    while (f.component_count() > 1) {
        int t = f.component_count();

        if (int e = first_greedy_edge(); e >= 0) {
            f.add_edge(e);
            out.trace.push_back({t, "greedy", -1, -1, -1});
            ++out.iterations;
            continue;
        }

        auto missing = f.missing_colors();
        if (missing.empty()) {
            out.stuck = StuckReason::colors_exhausted;
            out.stuck_t = t;
            break;
        }

        // exchange augmentation inside the pool, seeded at each missing color
        bool advanced = false;
        int best_j_count = -1;
        std::vector<std::pair<int, ReplacementSearchResult>> searches;
        for (int sigma : missing) {
            auto res = replacement_color_set(f, sigma, pool);
            out.max_j_seen = std::max(out.max_j_seen, res.stats.colors_visited);
            best_j_count = std::max(best_j_count, res.stats.colors_visited);
            if (res.augmented) {
                f = std::move(*res.forest);
                for (int e : f.edges()) pool.add(e, flat->color_of(e));
                out.trace.push_back({t, "exchange", sigma, res.stats.colors_visited, -1});
                ++out.iterations;
                advanced = true;
                break;
            }
            searches.emplace_back(sigma, std::move(res));
        }
        if (advanced) continue;

        // a fresh sparse edge of some color in J, crossing two components
        if (stack.has_sparse_layer(t)) {
            auto view = fresh_layer_view(stack, t);
            out.layers_consumed.push_back(t);
            for (auto& [sigma, res] : searches) {
                std::vector<bool> in_j(stack.palette + 1, false);
                for (const auto& w : res.color_set) in_j[w.color] = true;
                int chosen_edge = -1;
                for (const auto& ce : view) {
                    if (!in_j[ce.color]) continue;
                    auto [u, v] = host.edge(ce.edge);
                    if (!f.same_component(u, v)) {
                        chosen_edge = ce.edge;
                        break;
                    }
                }
                if (chosen_edge < 0) continue;
                int j = flat->color_of(chosen_edge);
                const ColorWitness* witness = res.find(j);
                f = materialize_witness(f, witness->deltas);
                f.add_edge(chosen_edge);
                for (int e : f.edges()) pool.add(e, flat->color_of(e));
                out.trace.push_back(
                    {t, "exchange+layer", sigma, static_cast<int>(res.color_set.size()), j});
                ++out.iterations;
                advanced = true;
                break;
            }
        }
        if (advanced) continue;

        if (!out.pool_recovered && pool.size() < flat->kept_count()) {
            out.pool_recovered = true;
            for (int e : flat->kept()) pool.add(e, flat->color_of(e));
            continue;
        }

        out.stuck = stack.has_sparse_layer(t) ? StuckReason::no_sparse_edge
                                              : StuckReason::layer_range_exhausted;
        out.stuck_t = t;
        out.stuck_j_count = best_j_count;
        break;
    }

    out.success = f.component_count() == 1;
    out.stuck_missing_colors = static_cast<int>(f.missing_colors().size());
    out.forest = std::move(f);
    return out;
}

}  // namespace rainbow
