#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rainbow/engine.hpp"
#include "rainbow/graph.hpp"
#include "rainbow/lemma_checks.hpp"
#include "rainbow/model.hpp"
#include "rainbow/oracles.hpp"
#include "rainbow/rng.hpp"

namespace rainbow {

/// Stream for one (trial, layer) slot of an experiment. The same triple
/// always yields the same stream, and distinct triples yield distinct
/// stream ids, which is what makes worker scheduling irrelevant to the
/// output bytes.
inline RandomStream derive_trial_stream(std::uint64_t master_seed, std::uint64_t trial_index,
                                        std::uint64_t layer_index) {
    return RandomStream(master_seed, derive_stream_id(master_seed, trial_index, layer_index));
}

namespace detail {

/// Runs fn(i) for i in 0..count-1 on `threads` workers. Work items are
/// claimed through an atomic counter; each item writes only to its own
/// result slot, so outputs are independent of the schedule.
template <typename Fn>
void parallel_for(long count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            long i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> crew;
    int spawn = std::min<long>(threads, count);
    crew.reserve(spawn);
    for (int t = 0; t < spawn; ++t) crew.emplace_back(worker);
    for (auto& th : crew) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline std::string format_frac(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

}  // namespace detail

enum class ExperimentMode { exact_threshold, pipeline, lemma };

inline const char* mode_name(ExperimentMode m) {
    switch (m) {
        case ExperimentMode::exact_threshold: return "exact_threshold";
        case ExperimentMode::pipeline: return "pipeline";
        case ExperimentMode::lemma: return "lemma";
    }
    return "?";
}

/// Flat key=value experiment description; repeated keys form lists. The
/// format round-trips losslessly through parse/serialize.
struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::exact_threshold;
    HostSpec::Family family = HostSpec::Family::complete;
    std::vector<int> n_list;
    int d = -1;  // -1: family default (complete uses n-1)
    std::vector<double> coeff_list;    // threshold mode: p = c * ln n / d
    std::vector<double> epsilon_list;  // pipeline/lemma modes
    int palette_fixed = 0;             // 0: n-1
    long trials = 1;
    std::uint64_t master_seed = 0;
    double omega = 3.0;    // lemma mode, colorhit
    int cut_samples = 100;  // lemma mode, cuts
    std::string output_path;

    bool operator==(const ExperimentConfig&) const = default;

    void validate() const {
        if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
        if (n_list.empty()) throw std::invalid_argument("config: need at least one n");
        for (double c : coeff_list) {
            if (c < 0.0) throw std::invalid_argument("config: coefficients must be >= 0");
        }
        for (double e : epsilon_list) {
            if (e <= 0.0) throw std::invalid_argument("config: epsilon must be positive");
        }
        if (mode == ExperimentMode::exact_threshold && coeff_list.empty()) {
            throw std::invalid_argument("config: threshold mode needs coeff values");
        }
        if (mode != ExperimentMode::exact_threshold && epsilon_list.empty()) {
            throw std::invalid_argument("config: pipeline/lemma mode needs epsilon values");
        }
    }

    HostSpec host_spec_for(int n) const {
        switch (family) {
            case HostSpec::Family::complete:
                return HostSpec::complete(n);
            case HostSpec::Family::circulant: {
                if (d < 2 || d % 2 != 0) {
                    throw std::invalid_argument("config: circulant needs even d >= 2");
                }
                return HostSpec::circulant_consecutive(n, d / 2);
            }
            case HostSpec::Family::random_regular:
                if (d < 1) throw std::invalid_argument("config: random-regular needs d");
                return HostSpec::random_regular(n, d);
        }
        throw std::logic_error("config: unknown family");
    }

    int palette_for(int n) const { return palette_fixed > 0 ? palette_fixed : n - 1; }

    static ExperimentConfig parse(std::istream& is) {
        ExperimentConfig cfg;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("config: expected key=value, got '" + line + "'");
            }
            std::string key = line.substr(0, eq), value = line.substr(eq + 1);
            if (key == "mode") {
                if (value == "exact_threshold") cfg.mode = ExperimentMode::exact_threshold;
                else if (value == "pipeline") cfg.mode = ExperimentMode::pipeline;
                else if (value == "lemma") cfg.mode = ExperimentMode::lemma;
                else throw std::invalid_argument("config: unknown mode '" + value + "'");
            } else if (key == "family") {
                if (value == "complete") cfg.family = HostSpec::Family::complete;
                else if (value == "circulant") cfg.family = HostSpec::Family::circulant;
                else if (value == "random-regular") cfg.family = HostSpec::Family::random_regular;
                else throw std::invalid_argument("config: unknown family '" + value + "'");
            } else if (key == "n") {
                cfg.n_list.push_back(std::stoi(value));
            } else if (key == "d") {
                cfg.d = std::stoi(value);
            } else if (key == "coeff") {
                cfg.coeff_list.push_back(std::stod(value));
            } else if (key == "epsilon") {
                cfg.epsilon_list.push_back(std::stod(value));
            } else if (key == "palette") {
                cfg.palette_fixed = value == "n_minus_1" ? 0 : std::stoi(value);
            } else if (key == "trials") {
                cfg.trials = std::stol(value);
            } else if (key == "master_seed") {
                cfg.master_seed = std::stoull(value);
            } else if (key == "omega") {
                cfg.omega = std::stod(value);
            } else if (key == "cut_samples") {
                cfg.cut_samples = std::stoi(value);
            } else if (key == "output") {
                cfg.output_path = value;
            } else {
                throw std::invalid_argument("config: unknown key '" + key + "'");
            }
        }
        cfg.validate();
        return cfg;
    }

    void serialize(std::ostream& os) const {
        os << "mode=" << mode_name(mode) << "\n";
        os << "family="
           << (family == HostSpec::Family::complete      ? "complete"
               : family == HostSpec::Family::circulant   ? "circulant"
                                                         : "random-regular")
           << "\n";
        for (int n : n_list) os << "n=" << n << "\n";
        if (d >= 0) os << "d=" << d << "\n";
        for (double c : coeff_list) os << "coeff=" << detail::format_frac(c) << "\n";
        for (double e : epsilon_list) os << "epsilon=" << detail::format_frac(e) << "\n";
        if (palette_fixed > 0) os << "palette=" << palette_fixed << "\n";
        else os << "palette=n_minus_1\n";
        os << "trials=" << trials << "\n";
        os << "master_seed=" << master_seed << "\n";
        if (mode == ExperimentMode::lemma) {
            os << "omega=" << detail::format_frac(omega) << "\n";
            os << "cut_samples=" << cut_samples << "\n";
        }
        if (!output_path.empty()) os << "output=" << output_path << "\n";
    }
};

/// One Monte Carlo trial's inputs and outcomes.
struct TrialRecord {
    int n = 0;
    int d = 0;
    int lambda = 0;
    double c_or_epsilon = 0.0;
    std::uint64_t seed = 0;
    ExperimentMode mode = ExperimentMode::pipeline;

    bool exact_rst = false;
    bool pipeline_rst = false;
    int initial_forest_size = 0;
    int missing_colors_after_initial = 0;
    int driver_iterations = 0;
    int max_j_seen = 0;
    std::string stuck_reason = "-";
    double wall_time_s = 0.0;  // recorded, never part of golden output
};

/// Success fraction should not decrease in c; flags an adjacent-cell
/// inversion larger than three standard errors of the difference.
inline bool monotone_inversion_flag(double frac_low_c, double frac_high_c, long trials) {
    double se = std::sqrt(frac_low_c * (1.0 - frac_low_c) / trials +
                          frac_high_c * (1.0 - frac_high_c) / trials);
    return frac_low_c - frac_high_c > 3.0 * se;
}

namespace detail {

struct HostBundle {
    std::shared_ptr<const Graph> graph;
    int d = 0;
    int lambda = 0;
};

inline HostBundle prepare_host(const ExperimentConfig& cfg, int n) {
    HostSpec spec = cfg.host_spec_for(n);
    std::optional<RandomStream> host_rng;
    RandomStream* rng_ptr = nullptr;
    if (spec.family == HostSpec::Family::random_regular) {
        host_rng.emplace(cfg.master_seed, derive_stream_id(cfg.master_seed, 0x686F7374ull,
                                                           static_cast<std::uint64_t>(n)));
        rng_ptr = &*host_rng;
    }
    HostBundle bundle;
    bundle.graph = std::make_shared<const Graph>(build_host(spec, rng_ptr));
    bundle.d = bundle.graph->degree(0);
    bundle.lambda = edge_connectivity(*bundle.graph);
    return bundle;
}

}  // namespace detail

/// Sweeps (n, c) cells, decides each sampled instance with the exact
/// oracle, and emits one CSV row per cell:
///   n,d,lambda,c,trials,success_frac,missing_color_frac,isolated_frac
/// Cells whose p = c*ln(n)/d reaches 1 are skipped (trials column 0) and
/// explained on the warnings stream.
inline std::string run_threshold_experiment(const ExperimentConfig& cfg, int threads,
                                            std::ostream* warnings = nullptr) {
    cfg.validate();
    std::ostringstream csv;
    csv << "n,d,lambda,c,trials,success_frac,missing_color_frac,isolated_frac\n";

    struct Outcome {
        bool rst = false;
        bool missing_color = false;
        bool isolated = false;
    };

    long cell_index = 0;
    std::vector<double> prev_success(cfg.n_list.size(), -1.0);
    for (size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        int n = cfg.n_list[ni];
        auto host = detail::prepare_host(cfg, n);
        int palette = cfg.palette_for(n);
        for (double c : cfg.coeff_list) {
            double p = threshold_probability(c, n, host.d);
            long base_trial = cell_index * cfg.trials;
            ++cell_index;

            if (p >= 1.0) {
                if (warnings != nullptr) {
                    *warnings << "skip cell n=" << n << " c=" << detail::format_frac(c)
                              << ": p=" << detail::format_frac(p) << " >= 1\n";
                }
                csv << n << "," << host.d << "," << host.lambda << "," << detail::format_frac(c)
                    << ",0," << detail::format_frac(0) << "," << detail::format_frac(0) << ","
                    << detail::format_frac(0) << "\n";
                continue;
            }

            std::vector<Outcome> outcomes(cfg.trials);
            detail::parallel_for(cfg.trials, threads, [&](long i) {
                RandomStream rng = derive_trial_stream(
                    cfg.master_seed, static_cast<std::uint64_t>(base_trial + i), 0);
                auto kept = sample_subgraph(*host.graph, p, rng);
                auto cg = std::make_shared<const ColoredSubgraph>(
                    color_uniform(host.graph, kept, palette, rng, {LayerKind::p_layer, 0}));

                Outcome& o = outcomes[i];
                o.missing_color =
                    static_cast<int>(cg->colors_present().size()) < palette;
                std::vector<char> touched(host.graph->vertex_count(), 0);
                for (int e : kept) {
                    auto [u, v] = host.graph->edge(e);
                    touched[u] = 1;
                    touched[v] = 1;
                }
                for (char t : touched) {
                    if (!t) {
                        o.isolated = true;
                        break;
                    }
                }
                o.rst = max_rainbow_forest_exact(cg).size() == host.graph->vertex_count() - 1;
            });

            long ok = 0, missing = 0, isolated = 0;
            for (const auto& o : outcomes) {
                ok += o.rst;
                missing += o.missing_color;
                isolated += o.isolated;
            }
            double success = static_cast<double>(ok) / cfg.trials;
            if (prev_success[ni] >= 0.0 && warnings != nullptr &&
                monotone_inversion_flag(prev_success[ni], success, cfg.trials)) {
                *warnings << "monotonicity flag: n=" << n << " c=" << detail::format_frac(c)
                          << " success dropped beyond 3 standard errors\n";
            }
            prev_success[ni] = success;

            csv << n << "," << host.d << "," << host.lambda << "," << detail::format_frac(c)
                << "," << cfg.trials << "," << detail::format_frac(success) << ","
                << detail::format_frac(static_cast<double>(missing) / cfg.trials) << ","
                << detail::format_frac(static_cast<double>(isolated) / cfg.trials) << "\n";
        }
    }
    return csv.str();
}

/// Runs the full multi-layer pipeline per trial and cross-checks it with
/// the exact oracle on the same flattened instance. One CSV row per
/// trial:
///   n,d,lambda,epsilon,seed,exact_rst,pipeline_rst,initial_forest_size,
///   driver_iterations,max_J,stuck_reason
inline std::string run_pipeline_experiment(const ExperimentConfig& cfg, int threads) {
    cfg.validate();
    std::ostringstream csv;
    csv << "n,d,lambda,epsilon,seed,exact_rst,pipeline_rst,initial_forest_size,"
           "driver_iterations,max_J,stuck_reason\n";

    long cell_index = 0;
    for (int n : cfg.n_list) {
        auto host = detail::prepare_host(cfg, n);
        int palette = cfg.palette_for(n);
        for (double epsilon : cfg.epsilon_list) {
            ModelParams params{n, host.d, epsilon, std::nullopt};
            long base_trial = cell_index * cfg.trials;
            ++cell_index;

            std::vector<TrialRecord> records(cfg.trials);
            detail::parallel_for(cfg.trials, threads, [&](long i) {
                auto t0 = std::chrono::steady_clock::now();
                std::uint64_t trial = static_cast<std::uint64_t>(base_trial + i);
                auto stack = build_exposure_stack(host.graph, params, cfg.master_seed, trial,
                                                  palette);
                auto driven = connect_forest_components(stack);

                TrialRecord& r = records[i];
                r.n = n;
                r.d = host.d;
                r.lambda = host.lambda;
                r.c_or_epsilon = epsilon;
                r.seed = derive_stream_id(cfg.master_seed, trial, 0);
                r.mode = ExperimentMode::pipeline;
                r.pipeline_rst = driven.success;
                r.initial_forest_size = driven.initial_forest_size;
                r.missing_colors_after_initial = driven.missing_after_initial;
                r.driver_iterations = driven.iterations;
                r.max_j_seen = driven.max_j_seen;
                r.stuck_reason = stuck_reason_name(driven.stuck);
                r.exact_rst = max_rainbow_forest_exact(driven.flattened).size() == n - 1;
                if (r.pipeline_rst && !r.exact_rst) {
                    throw std::logic_error("pipeline found a tree the exact oracle missed");
                }
                r.wall_time_s =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            });

            for (const auto& r : records) {
                csv << r.n << "," << r.d << "," << r.lambda << ","
                    << detail::format_frac(r.c_or_epsilon) << "," << r.seed << ","
                    << (r.exact_rst ? 1 : 0) << "," << (r.pipeline_rst ? 1 : 0) << ","
                    << r.initial_forest_size << "," << r.driver_iterations << "," << r.max_j_seen
                    << "," << r.stuck_reason << "\n";
            }
        }
    }
    return csv.str();
}

/// Validates the supporting lemmas on sampled instances. Emits one CSV
/// row per (lemma, cell) batch: lemma,instances,violations,worst_margin
inline std::string run_lemma_experiment(const ExperimentConfig& cfg, int threads) {
    cfg.validate();
    std::ostringstream csv;
    csv << "lemma,instances,violations,worst_margin\n";

    long cell_index = 0;
    for (int n : cfg.n_list) {
        auto host = detail::prepare_host(cfg, n);
        int palette = cfg.palette_for(n);
        for (double epsilon : cfg.epsilon_list) {
            ModelParams params{n, host.d, epsilon, std::nullopt};
            params.validate();
            double p = params.p_layer_probability();
            // half-cut sparsity presumes p below ln^2(n)/n; recorded per
            // instance rather than refusing to run
            double log_n = std::log(static_cast<double>(n));
            bool cut_hypothesis_holds = p < log_n * log_n / n;
            long base_trial = cell_index * cfg.trials;
            ++cell_index;

            struct PerTrial {
                CheckReport cuts, straddle, colorhit;
                bool straddle_ran = false;
            };
            std::vector<PerTrial> reports(cfg.trials);

            detail::parallel_for(cfg.trials, threads, [&](long i) {
                std::uint64_t trial = static_cast<std::uint64_t>(base_trial + i);
                RandomStream rng = derive_trial_stream(cfg.master_seed, trial, 0);
                auto kept = sample_subgraph(*host.graph, p, rng);
                auto gp = color_uniform(host.graph, kept, palette, rng,
                                        {LayerKind::p_layer, 0});

                PerTrial& pr = reports[i];
                pr.cuts = check_cut_sparsity(
                    *host.graph, kept,
                    CutPolicy::sampled(cfg.cut_samples,
                                       derive_stream_id(cfg.master_seed, trial, 1)));
                if (!cut_hypothesis_holds) ++pr.cuts.hypothesis_violations;

                // color-hit sets of size 1, 4, and the largest admissible
                double bound = n / (cfg.omega * std::log(static_cast<double>(n)));
                RandomStream krng = derive_trial_stream(cfg.master_seed, trial, 2);
                for (int want : {1, 4, 12}) {
                    int k = std::min(want, static_cast<int>(bound));
                    if (k < 1) continue;
                    std::vector<char> chosen(palette + 1, 0);
                    std::vector<int> color_set;
                    while (static_cast<int>(color_set.size()) < k) {
                        int c = 1 + static_cast<int>(krng.uniform_int(palette));
                        if (!chosen[c]) {
                            chosen[c] = 1;
                            color_set.push_back(c);
                        }
                    }
                    pr.colorhit.merge(check_color_hit(gp, color_set, cfg.omega));
                }

                // straddle on the initial forest's components, excluding G_p
                auto gp_ptr = std::make_shared<const ColoredSubgraph>(std::move(gp));
                RainbowForest f0 = build_initial_forest(gp_ptr);
                if (f0.component_count() >= 2) {
                    VertexPartition part{f0.canonical_partition(), f0.component_count()};
                    pr.straddle = check_straddle(*host.graph, kept, part);
                    pr.straddle_ran = true;
                }
            });

            CheckReport cuts, straddle, colorhit;
            cuts.lemma_id = "cuts";
            straddle.lemma_id = "straddle";
            colorhit.lemma_id = "colorhit";
            for (const auto& pr : reports) {
                cuts.merge(pr.cuts);
                colorhit.merge(pr.colorhit);
                if (pr.straddle_ran) straddle.merge(pr.straddle);
            }
            for (const auto& rep : {cuts, straddle, colorhit}) {
                csv << rep.lemma_id << "," << rep.instances_checked << "," << rep.violations
                    << ","
                    << detail::format_frac(rep.instances_checked ? rep.worst_margin : 0.0)
                    << "\n";
            }
        }
    }
    return csv.str();
}

inline std::string run_experiment(const ExperimentConfig& cfg, int threads,
                                  std::ostream* warnings = nullptr) {
    switch (cfg.mode) {
        case ExperimentMode::exact_threshold:
            return run_threshold_experiment(cfg, threads, warnings);
        case ExperimentMode::pipeline:
            return run_pipeline_experiment(cfg, threads);
        case ExperimentMode::lemma:
            return run_lemma_experiment(cfg, threads);
    }
    throw std::logic_error("run_experiment: unknown mode");
}

}  // namespace rainbow
