#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "rainbow/engine.hpp"
#include "rainbow/forest.hpp"
#include "rainbow/model.hpp"
#include "rainbow/union_find.hpp"

namespace rainbow {

/// Exact rainbow-spanning-tree decision by the color-deletion condition:
/// true iff removing the edges of any k colors (0 <= k <= n-2) leaves at
/// most k+1 components. Exponential in the number of present colors,
/// guarded at max_colors_guard.
inline bool schrijver_suzuki_decide(const ColoredSubgraph& cg, int max_colors_guard = 24) {
    const Graph& host = cg.host();
    int n = host.vertex_count();
    std::vector<int> colors = cg.colors_present();
    int k_colors = static_cast<int>(colors.size());
    if (k_colors > max_colors_guard) {
        throw std::runtime_error("schrijver_suzuki_decide: too many colors for enumeration");
    }

    std::vector<std::vector<int>> by_color(k_colors);
    for (int e : cg.kept()) {
        int idx = static_cast<int>(std::lower_bound(colors.begin(), colors.end(), cg.color_of(e)) -
                                   colors.begin());
        by_color[idx].push_back(e);
    }

    for (std::uint32_t mask = 0; mask < (1u << k_colors); ++mask) {
        int k = __builtin_popcount(mask);
        if (k > n - 2) continue;
        UnionFind uf(n);
        for (int c = 0; c < k_colors; ++c) {
            if (mask & (1u << c)) continue;
            for (int e : by_color[c]) {
                auto [u, v] = host.edge(e);
                uf.unite(u, v);
            }
        }
        if (uf.components() > k + 1) return false;
    }
    return true;
}

/// Maximum-cardinality rainbow forest via matroid intersection of the
/// graphic matroid (forests) with the partition matroid (one edge per
/// color). Starts from a greedy common independent set, then repeatedly
/// augments along shortest paths of the exchange graph:
///
///   sources  = edges joining two forest components,
///   sinks    = edges whose color is unused,
///   y -> x   = x is the forest edge sharing y's color,
///   x -> y   = x lies on the forest cycle that y would close.
///
/// A rainbow spanning tree exists iff the result has n-1 edges.
inline RainbowForest max_rainbow_forest_exact(std::shared_ptr<const ColoredSubgraph> cg) {
    const Graph& host = cg->host();
    const int m = host.edge_count();
    const int palette = cg->palette_size();

    std::vector<int> in_forest(m, 0);
    std::vector<int> edge_of_color(palette + 1, -1);

    auto build_uf = [&]() {
        UnionFind uf(host.vertex_count());
        for (int e = 0; e < m; ++e) {
            if (in_forest[e]) {
                auto [u, v] = host.edge(e);
                uf.unite(u, v);
            }
        }
        return uf;
    };

    // greedy warm start
    {
        UnionFind uf(host.vertex_count());
        for (int e : cg->kept()) {
            int c = cg->color_of(e);
            auto [u, v] = host.edge(e);
            if (edge_of_color[c] < 0 && !uf.same(u, v)) {
                uf.unite(u, v);
                in_forest[e] = 1;
                edge_of_color[c] = e;
            }
        }
    }

    for (;;) {
        UnionFind uf = build_uf();

        // forest adjacency for cycle/path lookups
        std::vector<std::vector<std::pair<int, int>>> fadj(host.vertex_count());
        for (int e = 0; e < m; ++e) {
            if (!in_forest[e]) continue;
            auto [u, v] = host.edge(e);
            fadj[u].emplace_back(v, e);
            fadj[v].emplace_back(u, e);
        }
        auto forest_path = [&](int u, int v) {
            std::vector<int> parent(host.vertex_count(), -2), parent_edge(host.vertex_count(), -1);
            std::vector<int> queue{u};
            parent[u] = -1;
            for (size_t head = 0; head < queue.size(); ++head) {
                int x = queue[head];
                if (x == v) break;
                for (auto [y, e] : fadj[x]) {
                    if (parent[y] == -2) {
                        parent[y] = x;
                        parent_edge[y] = e;
                        queue.push_back(y);
                    }
                }
            }
            std::vector<int> path;
            for (int x = v; parent[x] >= 0; x = parent[x]) path.push_back(parent_edge[x]);
            return path;
        };

        // arcs x -> y: for each outside edge y, list the forest edges on
        // the cycle it closes (reverse-indexed by x)
        std::vector<std::vector<int>> cycle_arcs(m);
        std::vector<char> is_source(m, 0), is_sink(m, 0);
        for (int y : cg->kept()) {
            if (in_forest[y]) continue;
            auto [u, v] = host.edge(y);
            if (!uf.same(u, v)) {
                is_source[y] = 1;
            } else {
                for (int x : forest_path(u, v)) cycle_arcs[x].push_back(y);
            }
            if (edge_of_color[cg->color_of(y)] < 0) is_sink[y] = 1;
        }
        for (auto& lst : cycle_arcs) std::sort(lst.begin(), lst.end());

        // shortest augmenting path by BFS from all sources
        std::vector<int> parent(m, -2);
        std::vector<int> queue;
        for (int y : cg->kept()) {
            if (is_source[y] && !in_forest[y]) {
                parent[y] = -1;
                queue.push_back(y);
            }
        }
        int goal = -1;
        for (size_t head = 0; head < queue.size() && goal < 0; ++head) {
            int z = queue[head];
            if (!in_forest[z]) {
                if (is_sink[z]) {
                    goal = z;
                    break;
                }
                int x = edge_of_color[cg->color_of(z)];
                if (x >= 0 && parent[x] == -2) {
                    parent[x] = z;
                    queue.push_back(x);
                }
            } else {
                for (int y : cycle_arcs[z]) {
                    if (parent[y] == -2) {
                        parent[y] = z;
                        queue.push_back(y);
                    }
                }
            }
        }
        if (goal < 0) break;

        for (int z = goal; z >= 0; z = parent[z]) {
            if (in_forest[z]) {
                in_forest[z] = 0;
                edge_of_color[cg->color_of(z)] = -1;
            } else {
                in_forest[z] = 1;
            }
            if (parent[z] < 0) break;
        }
        // second pass: record colors of the added edges
        for (int e = 0; e < m; ++e) {
            if (in_forest[e]) edge_of_color[cg->color_of(e)] = e;
        }
    }

    std::vector<int> edges;
    for (int e = 0; e < m; ++e) {
        if (in_forest[e]) edges.push_back(e);
    }
    return RainbowForest(std::move(cg), edges);
}

}  // namespace rainbow
