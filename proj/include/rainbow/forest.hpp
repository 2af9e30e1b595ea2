#pragma once

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <vector>

#include "rainbow/model.hpp"
#include "rainbow/union_find.hpp"

namespace rainbow {

/// Acyclic edge set with pairwise-distinct colors, viewed against a
/// flattened colored subgraph. Maintains a union-find over vertices that
/// is rebuilt lazily after removals. Always satisfies
/// |edges| + #components == n.
class RainbowForest {
public:
    explicit RainbowForest(std::shared_ptr<const ColoredSubgraph> view)
        : view_(std::move(view)),
          color_used_(view_->palette_size() + 1, false),
          comp_(view_->host().vertex_count()) {}

    RainbowForest(std::shared_ptr<const ColoredSubgraph> view, const std::vector<int>& edges)
        : RainbowForest(std::move(view)) {
        for (int e : edges) add_edge(e);
    }

    const ColoredSubgraph& view() const { return *view_; }
    std::shared_ptr<const ColoredSubgraph> view_ptr() const { return view_; }

    int vertex_count() const { return view_->host().vertex_count(); }
    int size() const { return static_cast<int>(edges_.size()); }

    /// Edge indices in ascending order.
    const std::vector<int>& edges() const { return edges_; }

    bool has_edge(int e) const {
        return std::binary_search(edges_.begin(), edges_.end(), e);
    }

    int color_of(int e) const { return view_->color_of(e); }
    bool uses_color(int c) const { return color_used_[c]; }

    std::vector<int> used_colors() const {
        std::vector<int> out;
        for (int c = 1; c < static_cast<int>(color_used_.size()); ++c) {
            if (color_used_[c]) out.push_back(c);
        }
        return out;
    }

    std::vector<int> missing_colors() const {
        std::vector<int> out;
        for (int c = 1; c < static_cast<int>(color_used_.size()); ++c) {
            if (!color_used_[c]) out.push_back(c);
        }
        return out;
    }

    void add_edge(int e) {
        if (!view_->contains(e)) {
            throw std::invalid_argument("RainbowForest: edge not in the colored view");
        }
        int c = view_->color_of(e);
        if (color_used_[c]) {
            throw std::invalid_argument("RainbowForest: color already used");
        }
        auto [u, v] = view_->host().edge(e);
        if (same_component(u, v)) {
            throw std::invalid_argument("RainbowForest: edge would close a cycle");
        }
        comp_.unite(u, v);
        edges_.insert(std::upper_bound(edges_.begin(), edges_.end(), e), e);
        color_used_[c] = true;
        adjacency_valid_ = false;
    }

    void remove_edge(int e) {
        auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
        if (it == edges_.end() || *it != e) {
            throw std::invalid_argument("RainbowForest: edge not present");
        }
        edges_.erase(it);
        color_used_[view_->color_of(e)] = false;
        comp_dirty_ = true;
        adjacency_valid_ = false;
    }

    int component_count() const {
        refresh_components();
        return comp_.components();
    }

    bool same_component(int u, int v) const {
        refresh_components();
        return comp_.same(u, v);
    }

    std::vector<int> canonical_partition() const {
        refresh_components();
        return comp_.canonical_labels();
    }

    /// Edge indices of the unique forest path between u and v, sorted
    /// ascending. Empty when u == v; throws when u and v are in
    /// different components.
    std::vector<int> tree_path_edges(int u, int v) const {
        if (u == v) return {};
        if (!same_component(u, v)) {
            throw std::invalid_argument("tree_path_edges: endpoints not connected");
        }
        refresh_adjacency();
        int n = vertex_count();
        std::vector<int> parent_edge(n, -1), parent(n, -1);
        std::vector<int> queue{u};
        std::vector<bool> seen(n, false);
        seen[u] = true;
        for (size_t head = 0; head < queue.size(); ++head) {
            int x = queue[head];
            if (x == v) break;
            for (auto [y, e] : adjacency_[x]) {
                if (!seen[y]) {
                    seen[y] = true;
                    parent[y] = x;
                    parent_edge[y] = e;
                    queue.push_back(y);
                }
            }
        }
        std::vector<int> path;
        for (int x = v; x != u; x = parent[x]) path.push_back(parent_edge[x]);
        std::sort(path.begin(), path.end());
        return path;
    }

    /// Full recomputation of every invariant; throws on violation.
    void validate() const {
        UnionFind uf(vertex_count());
        std::vector<bool> seen_color(view_->palette_size() + 1, false);
        for (int e : edges_) {
            if (!view_->contains(e)) throw std::logic_error("forest edge outside view");
            int c = view_->color_of(e);
            if (seen_color[c]) throw std::logic_error("forest repeats a color");
            seen_color[c] = true;
            auto [u, v] = view_->host().edge(e);
            if (!uf.unite(u, v)) throw std::logic_error("forest contains a cycle");
        }
        if (size() + component_count() != vertex_count()) {
            throw std::logic_error("forest size/component mismatch");
        }
        for (int c = 1; c <= view_->palette_size(); ++c) {
            if (seen_color[c] != color_used_[c]) {
                throw std::logic_error("used_colors out of sync");
            }
        }
    }

private:
    void refresh_components() const {
        if (!comp_dirty_) return;
        comp_ = UnionFind(vertex_count());
        for (int e : edges_) {
            auto [u, v] = view_->host().edge(e);
            comp_.unite(u, v);
        }
        comp_dirty_ = false;
    }

    void refresh_adjacency() const {
        if (adjacency_valid_) return;
        adjacency_.assign(vertex_count(), {});
        for (int e : edges_) {
            auto [u, v] = view_->host().edge(e);
            adjacency_[u].emplace_back(v, e);
            adjacency_[v].emplace_back(u, e);
        }
        adjacency_valid_ = true;
    }

    std::shared_ptr<const ColoredSubgraph> view_;
    std::vector<int> edges_;
    std::vector<bool> color_used_;
    mutable UnionFind comp_;
    mutable bool comp_dirty_ = false;
    mutable std::vector<std::vector<std::pair<int, int>>> adjacency_;
    mutable bool adjacency_valid_ = false;
};

}  // namespace rainbow
