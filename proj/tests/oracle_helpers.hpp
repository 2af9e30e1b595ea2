// Independent brute-force oracles used to freeze expected values. These
// deliberately avoid the library's algorithmic paths (union-find, matroid
// intersection, exchange search) and rely on plain DFS and enumeration.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <utility>
#include <vector>

#include "rainbow/model.hpp"

namespace testutil {

inline int dfs_component_count(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<bool> seen(n, false);
    int comps = 0;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        ++comps;
        std::vector<int> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y : adj[x]) {
                if (!seen[y]) {
                    seen[y] = true;
                    stack.push_back(y);
                }
            }
        }
    }
    return comps;
}

inline bool edges_connected(int n, const std::vector<std::pair<int, int>>& edges) {
    return dfs_component_count(n, edges) == 1;
}

/// Global min cut by enumerating all 2^(n-1)-1 proper bipartitions.
inline int brute_min_cut(const rainbow::Graph& g) {
    int n = g.vertex_count();
    if (!edges_connected(n, g.edges())) return 0;
    int best = g.edge_count() + 1;
    for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
        int cut = 0;
        for (auto [u, v] : g.edges()) {
            bool su = u == 0 ? false : ((mask >> (u - 1)) & 1u);
            bool sv = v == 0 ? false : ((mask >> (v - 1)) & 1u);
            if (su != sv) ++cut;
        }
        best = std::min(best, cut);
    }
    return best;
}

/// True iff some spanning tree of the kept edges is rainbow. Recursive
/// edge-subset search with acyclicity and color-distinctness pruning.
inline bool brute_has_rainbow_spanning_tree(const rainbow::ColoredSubgraph& cg) {
    const auto& host = cg.host();
    int n = host.vertex_count();
    const auto& kept = cg.kept();
    int m = static_cast<int>(kept.size());

    std::vector<std::pair<int, int>> chosen;
    std::vector<bool> used_color(cg.palette_size() + 1, false);

    std::function<bool(int, int)> go = [&](int idx, int picked) -> bool {
        if (picked == n - 1) return edges_connected(n, chosen);
        if (m - idx < n - 1 - picked) return false;
        for (int i = idx; i < m; ++i) {
            int e = kept[i];
            int c = cg.color_of(e);
            if (used_color[c]) continue;
            auto [u, v] = host.edge(e);
            chosen.emplace_back(u, v);
            // picked+1 edges stay acyclic iff the component count is exactly
            // n - (picked+1)
            if (dfs_component_count(n, chosen) == n - picked - 1) {
                used_color[c] = true;
                if (go(i + 1, picked + 1)) return true;
                used_color[c] = false;
            }
            chosen.pop_back();
        }
        return false;
    };
    if (n == 1) return true;
    return go(0, 0);
}

/// Size of a maximum rainbow forest by exhaustive search.
inline int brute_max_rainbow_forest(const rainbow::ColoredSubgraph& cg) {
    const auto& host = cg.host();
    int n = host.vertex_count();
    const auto& kept = cg.kept();
    int m = static_cast<int>(kept.size());

    std::vector<std::pair<int, int>> chosen;
    std::vector<bool> used_color(cg.palette_size() + 1, false);
    int best = 0;

    std::function<void(int, int)> go = [&](int idx, int picked) {
        best = std::max(best, picked);
        if (picked + (m - idx) <= best) return;
        for (int i = idx; i < m; ++i) {
            int e = kept[i];
            int c = cg.color_of(e);
            if (used_color[c]) continue;
            auto [u, v] = host.edge(e);
            chosen.emplace_back(u, v);
            if (dfs_component_count(n, chosen) == n - picked - 1) {
                used_color[c] = true;
                go(i + 1, picked + 1);
                used_color[c] = false;
            }
            chosen.pop_back();
        }
    };
    go(0, 0);
    return best;
}

/// Edge indices of the unique cycle of (forest + extra), found by DFS
/// through the forest between extra's endpoints. Empty if no cycle.
inline std::vector<int> brute_cycle_edges(const rainbow::Graph& host,
                                          const std::vector<int>& forest_edges, int extra) {
    int n = host.vertex_count();
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (int e : forest_edges) {
        auto [u, v] = host.edge(e);
        adj[u].emplace_back(v, e);
        adj[v].emplace_back(u, e);
    }
    auto [s, t] = host.edge(extra);
    std::vector<int> parent(n, -2), parent_edge(n, -1);
    parent[s] = -1;
    std::vector<int> stack{s};
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (auto [y, e] : adj[x]) {
            if (parent[y] == -2) {
                parent[y] = x;
                parent_edge[y] = e;
                stack.push_back(y);
            }
        }
    }
    if (parent[t] == -2) return {};
    std::vector<int> cycle{extra};
    for (int x = t; parent[x] >= 0; x = parent[x]) cycle.push_back(parent_edge[x]);
    std::sort(cycle.begin(), cycle.end());
    return cycle;
}

/// The brute-force "definable" color set J: colors j such that some
/// rainbow forest on the pool has the same vertex partition as base_edges
/// and color set (colors(base) + sigma - j). Enumerates all subsets of
/// the pool, so it is independent of the exchange search it checks.
inline std::set<int> brute_definable_j(const rainbow::ColoredSubgraph& cg,
                                       const std::vector<int>& pool_edges,
                                       const std::vector<int>& base_edges, int sigma) {
    const auto& host = cg.host();
    int n = host.vertex_count();
    int m = static_cast<int>(pool_edges.size());

    auto partition_of = [&](const std::vector<int>& edges) {
        std::vector<std::pair<int, int>> pairs;
        for (int e : edges) pairs.push_back(host.edge(e));
        std::vector<std::vector<int>> adj(n);
        for (auto [u, v] : pairs) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        std::vector<int> label(n, -1);
        for (int s = 0; s < n; ++s) {
            if (label[s] >= 0) continue;
            std::vector<int> stack{s};
            label[s] = s;
            while (!stack.empty()) {
                int x = stack.back();
                stack.pop_back();
                for (int y : adj[x]) {
                    if (label[y] < 0) {
                        label[y] = s;
                        stack.push_back(y);
                    }
                }
            }
        }
        return label;
    };

    std::vector<int> base_partition = partition_of(base_edges);
    std::set<int> base_colors;
    for (int e : base_edges) base_colors.insert(cg.color_of(e));

    std::set<int> result;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> subset;
        std::set<int> colors;
        bool rainbow = true;
        for (int i = 0; i < m && rainbow; ++i) {
            if (mask & (1u << i)) {
                subset.push_back(pool_edges[i]);
                rainbow = colors.insert(cg.color_of(pool_edges[i])).second;
            }
        }
        if (!rainbow) continue;
        std::vector<std::pair<int, int>> pairs;
        for (int e : subset) pairs.push_back(host.edge(e));
        if (dfs_component_count(n, pairs) != n - static_cast<int>(subset.size())) continue;
        if (partition_of(subset) != base_partition) continue;

        // subset must use colors(base) + sigma - j for exactly one j
        std::set<int> want = base_colors;
        want.insert(sigma);
        if (colors.size() + 1 != want.size()) continue;
        std::vector<int> diff;
        std::set_difference(want.begin(), want.end(), colors.begin(), colors.end(),
                            std::back_inserter(diff));
        if (diff.size() == 1 &&
            std::includes(want.begin(), want.end(), colors.begin(), colors.end())) {
            result.insert(diff[0]);
        }
    }
    return result;
}

}  // namespace testutil
