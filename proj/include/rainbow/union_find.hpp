#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

namespace rainbow {

/// Disjoint-set forest with union by size and path compression.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n), size_(n, 1), components_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) const {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --components_;
        return true;
    }

    bool same(int a, int b) const { return find(a) == find(b); }

    int components() const { return components_; }

    int element_count() const { return static_cast<int>(parent_.size()); }

    // Deterministic block labels: every vertex is labeled with the minimum
    // vertex index of its block.
    std::vector<int> canonical_labels() const {
        int n = element_count();
        std::vector<int> min_of_root(n, n);
        for (int v = 0; v < n; ++v) {
            int r = find(v);
            min_of_root[r] = std::min(min_of_root[r], v);
        }
        std::vector<int> label(n);
        for (int v = 0; v < n; ++v) label[v] = min_of_root[find(v)];
        return label;
    }

private:
    mutable std::vector<int> parent_;
    std::vector<int> size_;
    int components_;
};

}  // namespace rainbow
