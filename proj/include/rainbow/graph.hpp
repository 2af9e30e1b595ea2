#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rainbow/rng.hpp"
#include "rainbow/union_find.hpp"

namespace rainbow {

/// Immutable simple undirected graph. Vertices are 0..n-1; edges carry
/// stable indices so colorings and subgraphs can be stored as index sets.
/// The edge list is kept lexicographically sorted with u < v, which is
/// also the on-disk order of the text format.
class Graph {
public:
    Graph() = default;

    static Graph from_edges(int n, std::vector<std::pair<int, int>> edges) {
        if (n < 0) throw std::invalid_argument("Graph: negative vertex count");
        for (auto& [u, v] : edges) {
            if (u == v) throw std::invalid_argument("Graph: self-loop");
            if (u < 0 || v < 0 || u >= n || v >= n) {
                throw std::invalid_argument("Graph: endpoint out of range");
            }
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
            throw std::invalid_argument("Graph: duplicate edge");
        }
        Graph g;
        g.n_ = n;
        g.edges_ = std::move(edges);
        g.adjacency_.assign(n, {});
        for (int i = 0; i < static_cast<int>(g.edges_.size()); ++i) {
            auto [u, v] = g.edges_[i];
            g.adjacency_[u].emplace_back(v, i);
            g.adjacency_[v].emplace_back(u, i);
        }
        return g;
    }

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    std::pair<int, int> edge(int idx) const { return edges_[idx]; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    /// Per-vertex list of (neighbor, edge index), in ascending edge order.
    const std::vector<std::pair<int, int>>& neighbors(int v) const {
        return adjacency_[v];
    }

    int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }

    int min_degree() const {
        int best = n_ > 0 ? degree(0) : 0;
        for (int v = 1; v < n_; ++v) best = std::min(best, degree(v));
        return best;
    }

    bool is_regular(int d) const {
        for (int v = 0; v < n_; ++v) {
            if (degree(v) != d) return false;
        }
        return true;
    }

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<std::pair<int, int>>> adjacency_;
};

/// Parameters for the deterministic (or configuration-model) host families.
struct HostSpec {
    enum class Family { complete, circulant, random_regular };

    Family family = Family::complete;
    int n = 0;
    int d = 0;                 // target degree (random_regular; derived otherwise)
    std::vector<int> offsets;  // circulant only

    static HostSpec complete(int n) {
        HostSpec s;
        s.family = Family::complete;
        s.n = n;
        s.d = n - 1;
        return s;
    }

    static HostSpec circulant(int n, std::vector<int> offsets) {
        HostSpec s;
        s.family = Family::circulant;
        s.n = n;
        s.offsets = std::move(offsets);
        s.d = s.circulant_degree();
        return s;
    }

    // Offsets 1..k; the default Omega(n)-edge-connected host family.
    static HostSpec circulant_consecutive(int n, int k) {
        std::vector<int> offs(k);
        for (int i = 0; i < k; ++i) offs[i] = i + 1;
        return circulant(n, std::move(offs));
    }

    static HostSpec random_regular(int n, int d) {
        HostSpec s;
        s.family = Family::random_regular;
        s.n = n;
        s.d = d;
        return s;
    }

    int circulant_degree() const {
        int deg = 0;
        for (int o : offsets) {
            deg += (n % 2 == 0 && o == n / 2) ? 1 : 2;
        }
        return deg;
    }

    /// Spec strings: "complete:<n>", "circulant:<n>:<k>" (offsets 1..k),
    /// "circulant:<n>:<o1,o2,...>", "random-regular:<n>:<d>".
    static HostSpec parse(const std::string& text) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : text) {
            if (c == ':') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(cur);
        auto to_int = [](const std::string& s) {
            size_t pos = 0;
            int v = std::stoi(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("HostSpec: bad integer '" + s + "'");
            return v;
        };
        if (parts.size() == 2 && parts[0] == "complete") {
            return complete(to_int(parts[1]));
        }
        if (parts.size() == 3 && parts[0] == "circulant") {
            int n = to_int(parts[1]);
            if (parts[2].find(',') == std::string::npos) {
                return circulant_consecutive(n, to_int(parts[2]));
            }
            std::vector<int> offs;
            std::stringstream ss(parts[2]);
            std::string item;
            while (std::getline(ss, item, ',')) offs.push_back(to_int(item));
            return circulant(n, std::move(offs));
        }
        if (parts.size() == 3 && parts[0] == "random-regular") {
            return random_regular(to_int(parts[1]), to_int(parts[2]));
        }
        throw std::invalid_argument("HostSpec: cannot parse '" + text + "'");
    }

    std::string to_string() const {
        std::ostringstream os;
        switch (family) {
            case Family::complete:
                os << "complete:" << n;
                break;
            case Family::circulant: {
                os << "circulant:" << n << ":";
                for (size_t i = 0; i < offsets.size(); ++i) {
                    if (i) os << ",";
                    os << offsets[i];
                }
                break;
            }
            case Family::random_regular:
                os << "random-regular:" << n << ":" << d;
                break;
        }
        return os.str();
    }
};

namespace detail {

inline Graph build_complete(int n) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    }
    return Graph::from_edges(n, std::move(edges));
}

inline Graph build_circulant(const HostSpec& spec) {
    int n = spec.n;
    if (spec.offsets.empty()) {
        throw std::invalid_argument("circulant: offsets must be nonempty");
    }
    std::vector<bool> seen(n / 2 + 1, false);
    for (int o : spec.offsets) {
        if (o < 1 || o > n / 2) {
            throw std::invalid_argument("circulant: offset out of 1..n/2");
        }
        if (seen[o]) throw std::invalid_argument("circulant: duplicate offset");
        seen[o] = true;
    }
    // Offset o joins u and (u+o) mod n for every u; the half offset n/2 on
    // even n yields each pair twice, hence the dedup below.
    std::vector<std::pair<int, int>> edges;
    for (int o : spec.offsets) {
        for (int u = 0; u < n; ++u) {
            int v = (u + o) % n;
            edges.emplace_back(std::min(u, v), std::max(u, v));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Graph::from_edges(n, std::move(edges));
}

inline Graph build_random_regular(const HostSpec& spec, RandomStream& rng) {
    int n = spec.n, d = spec.d;
    if (static_cast<long long>(n) * d % 2 != 0) {
        throw std::invalid_argument("random-regular: n*d must be even");
    }
    // Configuration model with stepwise rejection (Steger-Wormald): pair
    // uniformly random stubs, rejecting loops and repeats pair by pair;
    // restart the attempt when legal pairs run dry. Whole-sample rejection
    // accepts with probability exp(-(d-1)/2 - (d-1)^2/4) and is hopeless
    // past d of about 5.
    constexpr int kMaxAttempts = 200;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::vector<int> stubs(static_cast<size_t>(n) * d);
        for (int v = 0; v < n; ++v) {
            for (int k = 0; k < d; ++k) stubs[static_cast<size_t>(v) * d + k] = v;
        }
        std::vector<std::vector<bool>> adjacent(n, std::vector<bool>(n, false));
        std::vector<std::pair<int, int>> edges;
        edges.reserve(stubs.size() / 2);

        bool stuck = false;
        while (!stubs.empty() && !stuck) {
            int redraws = 0;
            for (;; ++redraws) {
                if (redraws > 200) {
                    stuck = true;
                    break;
                }
                size_t a = rng.uniform_int(static_cast<std::uint32_t>(stubs.size()));
                size_t b = rng.uniform_int(static_cast<std::uint32_t>(stubs.size()));
                if (a == b) continue;
                int u = stubs[a], v = stubs[b];
                if (u == v || adjacent[u][v]) continue;
                adjacent[u][v] = adjacent[v][u] = true;
                edges.emplace_back(std::min(u, v), std::max(u, v));
                if (a < b) std::swap(a, b);  // pop the larger index first
                stubs[a] = stubs.back();
                stubs.pop_back();
                stubs[b] = stubs.back();
                stubs.pop_back();
                break;
            }
        }
        if (stuck) continue;
        return Graph::from_edges(n, std::move(edges));
    }
    throw std::runtime_error("random-regular: rejection sampling failed");
}

}  // namespace detail

/// Builds a d-regular simple host graph. Complete and circulant hosts are
/// deterministic; random-regular consumes the stream (required non-null).
inline Graph build_host(const HostSpec& spec, RandomStream* rng = nullptr) {
    if (spec.n < 2) throw std::invalid_argument("build_host: n must be >= 2");
    switch (spec.family) {
        case HostSpec::Family::complete:
            return detail::build_complete(spec.n);
        case HostSpec::Family::circulant:
            return detail::build_circulant(spec);
        case HostSpec::Family::random_regular:
            if (spec.d >= spec.n || spec.d < 1) {
                throw std::invalid_argument("build_host: need 1 <= d < n");
            }
            if (rng == nullptr) {
                throw std::invalid_argument("build_host: random-regular needs an rng");
            }
            return detail::build_random_regular(spec, *rng);
    }
    throw std::logic_error("build_host: unknown family");
}

/// Vertex partition with deterministic labels (minimum vertex per block).
struct VertexPartition {
    std::vector<int> label;
    int block_count = 0;

    std::vector<std::vector<int>> blocks() const {
        std::vector<std::vector<int>> out;
        int n = static_cast<int>(label.size());
        std::vector<int> slot(n, -1);
        for (int v = 0; v < n; ++v) {
            int rep = label[v];
            if (slot[rep] < 0) {
                slot[rep] = static_cast<int>(out.size());
                out.emplace_back();
            }
            out[slot[rep]].push_back(v);
        }
        return out;
    }

    bool operator==(const VertexPartition& other) const {
        return label == other.label;
    }
};

/// Connected components of (V(g), edge_subset).
inline VertexPartition components(const Graph& g, const std::vector<int>& edge_subset) {
    UnionFind uf(g.vertex_count());
    for (int e : edge_subset) {
        auto [u, v] = g.edge(e);
        uf.unite(u, v);
    }
    return VertexPartition{uf.canonical_labels(), uf.components()};
}

inline VertexPartition components_all(const Graph& g) {
    std::vector<int> all(g.edge_count());
    std::iota(all.begin(), all.end(), 0);
    return components(g, all);
}

/// Global minimum edge-cut via Stoer-Wagner, O(n^3). Returns 0 for
/// disconnected or trivial graphs.
inline int edge_connectivity(const Graph& g) {
    int n = g.vertex_count();
    if (n < 2) return 0;
    if (components_all(g).block_count > 1) return 0;

    std::vector<std::vector<int>> w(n, std::vector<int>(n, 0));
    for (auto [u, v] : g.edges()) {
        w[u][v] = 1;
        w[v][u] = 1;
    }
    std::vector<int> nodes(n);
    std::iota(nodes.begin(), nodes.end(), 0);

    int best = std::numeric_limits<int>::max();
    while (nodes.size() > 1) {
        // Maximum-adjacency order; the last-added vertex defines the
        // cut-of-the-phase, then merges into its predecessor.
        std::vector<int> weight(n, 0);
        std::vector<bool> added(n, false);
        int prev = -1, last = -1;
        for (size_t step = 0; step < nodes.size(); ++step) {
            int pick = -1;
            for (int v : nodes) {
                if (!added[v] && (pick < 0 || weight[v] > weight[pick])) pick = v;
            }
            added[pick] = true;
            prev = last;
            last = pick;
            for (int v : nodes) {
                if (!added[v]) weight[v] += w[pick][v];
            }
        }
        best = std::min(best, weight[last]);
        for (int v : nodes) {
            if (v != prev && v != last) {
                w[prev][v] += w[last][v];
                w[v][prev] = w[prev][v];
            }
        }
        nodes.erase(std::find(nodes.begin(), nodes.end(), last));
    }
    return best;
}

// ---- text format: "n m" header, then m lines "u v", u < v, sorted ----

inline void write_graph(std::ostream& os, const Graph& g) {
    os << g.vertex_count() << " " << g.edge_count() << "\n";
    for (auto [u, v] : g.edges()) os << u << " " << v << "\n";
}

inline Graph read_graph(std::istream& is) {
    int n = 0, m = 0;
    if (!(is >> n >> m)) throw std::runtime_error("graph file: bad header");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(m);
    for (int i = 0; i < m; ++i) {
        int u = 0, v = 0;
        if (!(is >> u >> v)) throw std::runtime_error("graph file: truncated edge list");
        if (u >= v) throw std::runtime_error("graph file: edges must satisfy u < v");
        edges.emplace_back(u, v);
    }
    if (!std::is_sorted(edges.begin(), edges.end())) {
        throw std::runtime_error("graph file: edges must be sorted");
    }
    return Graph::from_edges(n, std::move(edges));
}

}  // namespace rainbow
