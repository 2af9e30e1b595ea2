#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "rainbow/graph.hpp"
#include "rainbow/rng.hpp"

namespace rainbow {

// All logarithms are natural. The convention is fixed project-wide: the
// dense-layer probability, the sparse family, the layer-index bound and
// every threshold in the experiment harness use ln.

/// Coefficient c applied as p = c * ln(n) / d (single-exposure form).
inline double threshold_probability(double c, double n, double d) {
    return c * std::log(n) / d;
}

/// Largest sparse index: floor(ln^3 n) - 1. Values below 2 mean the
/// sparse family is empty and only the dense layer is exposed.
inline int max_sparse_index(double n) {
    double l = std::log(n);
    return static_cast<int>(std::floor(l * l * l)) - 1;
}

/// Sum of the sparse inclusion probabilities sqrt(ln n)/(t*n) over
/// t = 2 .. max_sparse_index(n). Pure formula, usable at any n.
inline double sparse_probability_sum(double n) {
    int tmax = max_sparse_index(n);
    double s = 0.0;
    for (int t = 2; t <= tmax; ++t) s += std::sqrt(std::log(n)) / (t * n);
    return s;
}

struct InclusionBound {
    double total;  // p + sum of s_t
    double bound;  // (2 + epsilon) * ln(n) / d
    bool holds;
};

/// Evaluates whether the union of all layers keeps each edge with
/// probability below (2+epsilon) ln(n)/d. Valid for large n; at desk
/// scale the caller records the actual total instead of asserting.
inline InclusionBound inclusion_bound(double n, double d, double epsilon) {
    double total = threshold_probability(2.0 + epsilon / 2.0, n, d) + sparse_probability_sum(n);
    double bound = threshold_probability(2.0 + epsilon, n, d);
    return {total, bound, total < bound};
}

/// Model parameters for one (host, epsilon) cell.
struct ModelParams {
    int n = 0;
    int d = 0;
    double epsilon = 0.0;
    std::optional<double> coeff;  // overrides the dense-layer coefficient

    double log_n() const { return std::log(static_cast<double>(n)); }

    double dense_coefficient() const {
        return coeff ? *coeff : 2.0 + epsilon / 2.0;
    }

    double p_layer_probability() const {
        return dense_coefficient() * log_n() / d;
    }

    double sparse_probability(int t) const {
        return std::sqrt(log_n()) / (static_cast<double>(t) * n);
    }

    int sparse_index_bound() const { return max_sparse_index(n); }

    void validate() const {
        if (n < 2 || d < 1) throw std::invalid_argument("ModelParams: need n >= 2, d >= 1");
        double p = p_layer_probability();
        if (!(p > 0.0 && p < 1.0)) {
            throw std::invalid_argument("ModelParams: p outside (0,1)");
        }
        int tmax = sparse_index_bound();
        for (int t = 2; t <= tmax; ++t) {
            double s = sparse_probability(t);
            if (!(s > 0.0 && s < 1.0)) {
                throw std::invalid_argument("ModelParams: s_t outside (0,1)");
            }
        }
    }
};

enum class LayerKind { p_layer, sparse_layer, flattened };

struct LayerLabel {
    LayerKind kind = LayerKind::flattened;
    int t = 0;  // sparse index; 0 for the dense layer and flattened views
};

/// A colored subset of a host graph's edges. Colors are 1..palette_size;
/// 0 marks an edge outside the subgraph.
class ColoredSubgraph {
public:
    ColoredSubgraph(std::shared_ptr<const Graph> host, int palette, LayerLabel label)
        : host_(std::move(host)),
          palette_(palette),
          label_(label),
          color_by_edge_(host_->edge_count(), 0) {
        if (palette_ < 1) throw std::invalid_argument("ColoredSubgraph: palette must be >= 1");
    }

    const Graph& host() const { return *host_; }
    std::shared_ptr<const Graph> host_ptr() const { return host_; }
    int palette_size() const { return palette_; }
    LayerLabel label() const { return label_; }

    void set_color(int edge, int color) {
        if (color < 1 || color > palette_) {
            throw std::invalid_argument("ColoredSubgraph: color outside palette");
        }
        if (color_by_edge_[edge] == 0) {
            if (!kept_.empty() && edge < kept_.back()) sorted_ = false;
            kept_.push_back(edge);
        }
        color_by_edge_[edge] = color;
    }

    bool contains(int edge) const { return color_by_edge_[edge] != 0; }
    int color_of(int edge) const { return color_by_edge_[edge]; }

    /// Kept edge indices in ascending order.
    const std::vector<int>& kept() const {
        if (!sorted_) {
            std::sort(kept_.begin(), kept_.end());
            sorted_ = true;
        }
        return kept_;
    }

    int kept_count() const { return static_cast<int>(kept_.size()); }

    std::vector<int> colors_present() const {
        std::vector<bool> seen(palette_ + 1, false);
        for (int e : kept_) seen[color_by_edge_[e]] = true;
        std::vector<int> out;
        for (int c = 1; c <= palette_; ++c) {
            if (seen[c]) out.push_back(c);
        }
        return out;
    }

private:
    std::shared_ptr<const Graph> host_;
    int palette_;
    LayerLabel label_;
    std::vector<int> color_by_edge_;
    mutable std::vector<int> kept_;
    mutable bool sorted_ = true;
};

/// Keeps each edge independently with probability q; returns the kept
/// edge indices in ascending order. One draw per host edge, so the
/// edge/draw correspondence is reproducible.
inline std::vector<int> sample_subgraph(const Graph& g, double q, RandomStream& rng) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("sample_subgraph: q outside [0,1]");
    std::vector<int> kept;
    for (int e = 0; e < g.edge_count(); ++e) {
        if (rng.bernoulli(q)) kept.push_back(e);
    }
    return kept;
}

/// Assigns each edge of edge_set an independent uniform color in
/// 1..palette.
inline ColoredSubgraph color_uniform(std::shared_ptr<const Graph> host,
                                     const std::vector<int>& edge_set, int palette,
                                     RandomStream& rng,
                                     LayerLabel label = {LayerKind::flattened, 0}) {
    ColoredSubgraph cg(std::move(host), palette, label);
    for (int e : edge_set) {
        cg.set_color(e, 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(palette))));
    }
    return cg;
}

/// Ordered family of independently sampled, independently colored layers:
/// the dense layer first, then sparse layers for t = t_max down to 2.
/// An edge in several layers takes its color from the earliest one.
struct ExposureStack {
    std::shared_ptr<const Graph> host;
    ModelParams params;
    int palette = 0;
    int t_max = 0;  // < 2 when only the dense layer exists
    std::vector<ColoredSubgraph> layers;
    std::vector<std::uint64_t> stream_ids;

    int layer_count() const { return static_cast<int>(layers.size()); }

    const ColoredSubgraph& p_layer() const { return layers.front(); }

    bool has_sparse_layer(int t) const { return t >= 2 && t <= t_max; }

    /// Layer for sparse index t; layers are stored in exposure order, so
    /// index 1 holds t_max and the last index holds t = 2.
    const ColoredSubgraph& sparse_layer(int t) const {
        if (!has_sparse_layer(t)) {
            throw std::out_of_range("ExposureStack: sparse index out of range");
        }
        return layers[1 + (t_max - t)];
    }
};

/// Samples and colors the whole family. Layer streams are derived as
/// (master_seed, trial_index, layer_id) with layer_id 0 for the dense
/// layer and t for the sparse layer s_t, so all layers are independent
/// and the build is reproducible bit for bit.
inline ExposureStack build_exposure_stack(std::shared_ptr<const Graph> host,
                                          const ModelParams& params,
                                          std::uint64_t master_seed,
                                          std::uint64_t trial_index = 0,
                                          int palette_override = 0) {
    params.validate();
    if (host->vertex_count() != params.n) {
        throw std::invalid_argument("build_exposure_stack: host order != params.n");
    }
    ExposureStack stack;
    stack.host = host;
    stack.params = params;
    stack.palette = palette_override > 0 ? palette_override : params.n - 1;
    stack.t_max = params.sparse_index_bound();

    auto add_layer = [&](double q, LayerLabel label, std::uint64_t layer_id) {
        RandomStream rng(master_seed, derive_stream_id(master_seed, trial_index, layer_id));
        auto kept = sample_subgraph(*host, q, rng);
        stack.layers.push_back(color_uniform(host, kept, stack.palette, rng, label));
        stack.stream_ids.push_back(rng.stream_id());
    };

    add_layer(params.p_layer_probability(), {LayerKind::p_layer, 0}, 0);
    for (int t = stack.t_max; t >= 2; --t) {
        add_layer(params.sparse_probability(t), {LayerKind::sparse_layer, t},
                  static_cast<std::uint64_t>(t));
    }
    return stack;
}

/// Union of all layers; each edge keeps the color of its earliest layer.
inline ColoredSubgraph flatten(const ExposureStack& stack) {
    ColoredSubgraph flat(stack.host, stack.palette, {LayerKind::flattened, 0});
    for (const auto& layer : stack.layers) {
        for (int e : layer.kept()) {
            if (!flat.contains(e)) flat.set_color(e, layer.color_of(e));
        }
    }
    return flat;
}

struct ColoredEdge {
    int edge;
    int color;

    bool operator==(const ColoredEdge&) const = default;
};

/// Edges of the sparse layer s_t that appear in no earlier layer, i.e.
/// exactly those whose flattened color is decided by s_t. Ascending edge
/// order.
inline std::vector<ColoredEdge> fresh_layer_view(const ExposureStack& stack, int t) {
    const ColoredSubgraph& layer = stack.sparse_layer(t);
    std::vector<ColoredEdge> out;
    for (int e : layer.kept()) {
        bool fresh = !stack.p_layer().contains(e);
        for (int earlier = stack.t_max; fresh && earlier > t; --earlier) {
            if (stack.sparse_layer(earlier).contains(e)) fresh = false;
        }
        if (fresh) out.push_back({e, layer.color_of(e)});
    }
    return out;
}

// ---- text format: "n m palette" header, then m lines "u v color" ----

inline void write_colored_subgraph(std::ostream& os, const ColoredSubgraph& cg) {
    os << cg.host().vertex_count() << " " << cg.kept_count() << " " << cg.palette_size() << "\n";
    for (int e : cg.kept()) {
        auto [u, v] = cg.host().edge(e);
        os << u << " " << v << " " << cg.color_of(e) << "\n";
    }
}

/// Reads a colored subgraph; the host graph is reconstructed from the
/// listed edges themselves.
inline ColoredSubgraph read_colored_subgraph(std::istream& is) {
    int n = 0, m = 0, palette = 0;
    if (!(is >> n >> m >> palette)) {
        throw std::runtime_error("colored subgraph file: bad header");
    }
    std::vector<std::pair<int, int>> edges(m);
    std::vector<int> colors(m);
    for (int i = 0; i < m; ++i) {
        if (!(is >> edges[i].first >> edges[i].second >> colors[i])) {
            throw std::runtime_error("colored subgraph file: truncated");
        }
    }
    auto host = std::make_shared<const Graph>(Graph::from_edges(n, edges));
    ColoredSubgraph cg(host, palette, {LayerKind::flattened, 0});
    for (int i = 0; i < m; ++i) {
        auto [u, v] = edges[i];
        int a = std::min(u, v), b = std::max(u, v);
        // Edge indices follow the host's sorted order; find each pair's slot.
        const auto& all = host->edges();
        auto it = std::lower_bound(all.begin(), all.end(), std::make_pair(a, b));
        cg.set_color(static_cast<int>(it - all.begin()), colors[i]);
    }
    return cg;
}

}  // namespace rainbow
