#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "data_matrix.hpp"
#include "datagen.hpp"
#include "energy.hpp"
#include "error.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "partition.hpp"
#include "random.hpp"
#include "solver.hpp"
#include "validation.hpp"

namespace kgroups {

enum class Algorithm { kgroups_first, kgroups_second, kmeans };

inline constexpr std::array<Algorithm, 3> all_algorithms = {Algorithm::kgroups_first, Algorithm::kgroups_second,
                                                            Algorithm::kmeans};

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::kgroups_first: return "kgroups_first";
        case Algorithm::kgroups_second: return "kgroups_second";
        case Algorithm::kmeans: return "kmeans";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
    if (s == "kgroups_first" || s == "first") return Algorithm::kgroups_first;
    if (s == "kgroups_second" || s == "second") return Algorithm::kgroups_second;
    if (s == "kmeans") return Algorithm::kmeans;
    throw InputError("unknown algorithm '" + std::string(s) + "'");
}

inline FitMode fit_mode_of(Algorithm a) {
    switch (a) {
        case Algorithm::kgroups_first: return FitMode::first_variation;
        case Algorithm::kgroups_second: return FitMode::second_variation;
        case Algorithm::kmeans: return FitMode::kmeans_alpha2;
    }
    return FitMode::first_variation;
}

/// Which design parameter a benchmark varies.
enum class SweepParameter { none, separation, alpha, dimension };

inline std::string_view to_string(SweepParameter s) {
    switch (s) {
        case SweepParameter::none: return "none";
        case SweepParameter::separation: return "separation";
        case SweepParameter::alpha: return "alpha";
        case SweepParameter::dimension: return "dimension";
    }
    return "?";
}

inline SweepParameter parse_sweep(std::string_view s) {
    if (s == "none") return SweepParameter::none;
    if (s == "separation" || s == "d") return SweepParameter::separation;
    if (s == "alpha") return SweepParameter::alpha;
    if (s == "dimension" || s == "dim") return SweepParameter::dimension;
    throw InputError("unknown sweep parameter '" + std::string(s) + "'");
}

/// Two-component 50/50 simulation design. Location families use
/// 0.5 F(0,1) + 0.5 F(separation,1) in `dim` coordinates; the cubic family
/// uses 0.5 U(0,1)^dim + 0.5 U(0.3,0.7)^dim.
struct Design {
    Family family = Family::normal;
    std::size_t n = 200;
    std::size_t dim = 1;
    double separation = 3.0;
};

/// Exponent used by the k-groups algorithms. Unset means: 0.5 for the
/// Cauchy design (no finite first moment), 1 otherwise. An alpha sweep
/// overrides both.
struct AlphaPolicy {
    std::optional<double> fixed;

    double for_family(Family f) const {
        if (fixed) return *fixed;
        return f == Family::cauchy ? 0.5 : 1.0;
    }
};

struct ExperimentSpec {
    Design design;
    /// Fit a fixed labelled CSV instead of simulating; replicates then
    /// differ only in the fit seed.
    std::optional<std::string> dataset_path;
    SweepParameter sweep = SweepParameter::none;
    std::vector<double> sweep_values;
    std::vector<Algorithm> algorithms{all_algorithms.begin(), all_algorithms.end()};
    std::size_t replicates = 100;
    std::uint64_t base_seed = 1;
    AlphaPolicy alpha_policy;
    std::size_t k = 2;
    std::size_t restarts = 10;
    std::size_t max_passes = 50;
    Pairing pairing = Pairing::sequential_nearest;
    /// Record wall-clock runtimes. Off makes every output byte-reproducible.
    bool record_timing = true;
    /// Replicate workers; 0 means one per hardware thread.
    std::size_t threads = 0;

    void validate() const {
        if (replicates == 0) throw InputError("replicate count B must be at least 1");
        if (algorithms.empty()) throw InputError("no algorithms selected");
        if (k == 0) throw InputError("K must be at least 1");
        if (restarts == 0) throw InputError("restarts must be at least 1");
        if (max_passes == 0) throw InputError("max_passes must be at least 1");
        if (sweep == SweepParameter::none) {
            if (!sweep_values.empty()) throw InputError("sweep values given without a sweep parameter");
        } else {
            if (sweep_values.empty()) throw InputError("sweep parameter given without values");
            for (std::size_t i = 1; i < sweep_values.size(); ++i) {
                if (!(sweep_values[i] > sweep_values[i - 1])) throw InputError("sweep values must be strictly increasing");
            }
        }
        for (double v : sweep_values) {
            if (!std::isfinite(v)) throw InputError("sweep values must be finite");
            if (sweep == SweepParameter::alpha) (void)Alpha(v);
            if (sweep == SweepParameter::dimension && (v < 1.0 || std::floor(v) != v)) {
                throw InputError("dimension sweep values must be positive integers");
            }
        }
        if (dataset_path && (sweep == SweepParameter::separation || sweep == SweepParameter::dimension)) {
            throw InputError("a dataset experiment can only sweep alpha");
        }
        if (!dataset_path) {
            if (design.n < k) throw InputError("design sample size is smaller than K");
            if (design.dim == 0) throw InputError("design dimension must be at least 1");
            if (design.family == Family::cubic_uniform && sweep == SweepParameter::separation) {
                throw InputError("the cubic design has no separation parameter");
            }
        }
        if (alpha_policy.fixed) (void)Alpha(*alpha_policy.fixed);
    }

    /// Sweep points actually run: the values, or one unnamed point.
    std::vector<double> points() const {
        if (sweep == SweepParameter::none) return {std::numeric_limits<double>::quiet_NaN()};
        return sweep_values;
    }
};

/// Mixture drawn for one (sweep value, replicate) cell.
inline MixtureSpec mixture_for(const ExperimentSpec& spec, double sweep_value, std::uint64_t seed) {
    const Design& d = spec.design;
    std::size_t dim = d.dim;
    double separation = d.separation;
    if (spec.sweep == SweepParameter::dimension) dim = static_cast<std::size_t>(sweep_value);
    if (spec.sweep == SweepParameter::separation) separation = sweep_value;
    if (d.family == Family::cubic_uniform) return cubic_mixture(dim, d.n, seed);
    return location_mixture(d.family, separation, d.n, dim, seed);
}

/// Scores of one algorithm on one replicate.
struct ReplicateScore {
    Algorithm algorithm = Algorithm::kgroups_first;
    double sweep_value = 0.0;
    std::size_t replicate = 0;
    std::uint64_t data_seed = 0;
    std::uint64_t fit_seed = 0;
    std::uint64_t checksum = 0;  ///< of the data matrix every algorithm saw
    double alpha = 1.0;
    bool ok = false;
    std::string error;
    IndexReport index;
    double within = std::numeric_limits<double>::quiet_NaN();
    double runtime_ms = 0.0;
};

struct IndexStat {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
};

struct ResultRow {
    Algorithm algorithm = Algorithm::kgroups_first;
    double sweep_value = 0.0;
    std::size_t count = 0;    ///< replicates that produced scores
    std::size_t missing = 0;  ///< replicates whose fit failed
    IndexStat diag, kappa, rand, crand;
    double mean_runtime_ms = 0.0;
};

struct ResultTable {
    SweepParameter sweep = SweepParameter::none;
    std::vector<ResultRow> rows;

    const ResultRow* find(Algorithm a, double sweep_value) const {
        for (const auto& r : rows) {
            if (r.algorithm == a && (r.sweep_value == sweep_value ||
                                     (std::isnan(r.sweep_value) && std::isnan(sweep_value)))) {
                return &r;
            }
        }
        return nullptr;
    }
};

struct ExperimentResult {
    ExperimentSpec spec;
    ResultTable table;
    std::vector<ReplicateScore> raw;
};

/// Mean and standard error (sample sd / sqrt(count)); se is NaN for a
/// single value.
inline IndexStat summarize(const std::vector<double>& xs) {
    IndexStat s;
    if (xs.empty()) return s;
    CompensatedSum sum;
    for (double x : xs) sum += x;
    const double n = static_cast<double>(xs.size());
    s.mean = sum.value() / n;
    if (xs.size() < 2) return s;
    CompensatedSum sq;
    for (double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(sq.value() / (n - 1.0)) / std::sqrt(n);
    return s;
}

/// Rows follow the ExperimentSpec algorithm order, then sweep order.
inline ResultTable aggregate(const ExperimentSpec& spec, const std::vector<ReplicateScore>& raw) {
    ResultTable table;
    table.sweep = spec.sweep;
    for (Algorithm a : spec.algorithms) {
        for (double v : spec.points()) {
            ResultRow row;
            row.algorithm = a;
            row.sweep_value = v;
            std::vector<double> diag, kappa, rnd, crand, runtime;
            for (const auto& s : raw) {
                const bool same_point = s.sweep_value == v || (std::isnan(s.sweep_value) && std::isnan(v));
                if (s.algorithm != a || !same_point) continue;
                if (!s.ok) {
                    ++row.missing;
                    continue;
                }
                diag.push_back(s.index.diag);
                kappa.push_back(s.index.kappa);
                rnd.push_back(s.index.rand);
                crand.push_back(s.index.crand);
                runtime.push_back(s.runtime_ms);
            }
            row.count = diag.size();
            row.diag = summarize(diag);
            row.kappa = summarize(kappa);
            row.rand = summarize(rnd);
            row.crand = summarize(crand);
            row.mean_runtime_ms = runtime.empty() ? 0.0 : summarize(runtime).mean;
            table.rows.push_back(row);
        }
    }
    return table;
}

struct FitRequest {
    std::size_t k = 2;
    double alpha = 1.0;
    std::size_t restarts = 10;
    std::size_t max_passes = 50;
    std::uint64_t seed = 0;
    Pairing pairing = Pairing::sequential_nearest;
};

/// Fits one algorithm. k-groups runs use `cache` when it matches alpha.
inline FitResult run_algorithm(Algorithm a, const DataMatrix& data, const FitRequest& req,
                               const DistanceCache* cache = nullptr) {
    FitConfig cfg;
    cfg.k = req.k;
    cfg.alpha = Alpha(a == Algorithm::kmeans ? 2.0 : req.alpha);
    cfg.restarts = req.restarts;
    cfg.max_passes = req.max_passes;
    cfg.seed = req.seed;
    cfg.mode = fit_mode_of(a);
    cfg.pairing = req.pairing;
    if (a == Algorithm::kmeans) return fit_kmeans_alpha2(data, cfg);
    if (cache && cache->alpha() == cfg.alpha && cache->n() == data.rows()) {
        return a == Algorithm::kgroups_first ? fit_first_variation(*cache, cfg) : fit_second_variation(*cache, cfg);
    }
    return fit(data, cfg);
}

/// Runs every (sweep value, replicate) cell. Within a cell all algorithms
/// fit the same draw (data seed base_seed + b) from the same fit seed.
/// Failures are kept as scores with ok = false.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    std::optional<io::CsvDataset> fixed;
    std::vector<std::size_t> fixed_truth;
    if (spec.dataset_path) {
        fixed = io::load_numeric_csv(*spec.dataset_path, {io::CsvOptions::Label::automatic, true});
        if (!fixed->labels) throw IngestionError("dataset '" + *spec.dataset_path + "' has no label column");
        const auto truth = Partition::from_raw_labels(*fixed->labels);
        fixed_truth.assign(truth.labels().begin(), truth.labels().end());
    }

    const auto points = spec.points();
    const std::size_t cells = points.size() * spec.replicates;
    const std::size_t per_cell = spec.algorithms.size();
    std::vector<ReplicateScore> raw(cells * per_cell);

    parallel_for(cells, spec.threads, [&](std::size_t cell) {
        const double v = points[cell / spec.replicates];
        const std::size_t b = cell % spec.replicates;
        const std::uint64_t data_seed = spec.base_seed + b;
        const std::uint64_t fit_seed = derive_seed(data_seed, 0x6b67726f757073ULL);

        const LabeledSample sample = fixed ? LabeledSample{fixed->data, fixed_truth, 0}
                                           : generate(mixture_for(spec, v, data_seed));
        const std::uint64_t checksum = sample.data.checksum();
        const double kg_alpha = spec.sweep == SweepParameter::alpha
                                    ? v
                                    : (fixed ? spec.alpha_policy.fixed.value_or(1.0)
                                             : spec.alpha_policy.for_family(spec.design.family));
        std::optional<DistanceCache> cache;

        for (std::size_t j = 0; j < per_cell; ++j) {
            const Algorithm a = spec.algorithms[j];
            ReplicateScore& s = raw[cell * per_cell + j];
            s.algorithm = a;
            s.sweep_value = v;
            s.replicate = b;
            s.data_seed = data_seed;
            s.fit_seed = fit_seed;
            s.checksum = checksum;
            s.alpha = a == Algorithm::kmeans ? 2.0 : kg_alpha;
            try {
                const auto t0 = std::chrono::steady_clock::now();
                if (a != Algorithm::kmeans && !cache) cache.emplace(sample.data, Alpha(kg_alpha));
                const FitRequest req{spec.k, kg_alpha, spec.restarts, spec.max_passes, fit_seed, spec.pairing};
                const FitResult r = run_algorithm(a, sample.data, req, cache ? &*cache : nullptr);
                const auto t1 = std::chrono::steady_clock::now();
                s.index = score(sample.truth, r.partition.labels());
                s.within = r.within;
                s.runtime_ms =
                    spec.record_timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
                s.ok = true;
            } catch (const std::exception& e) {
                s.ok = false;
                s.error = e.what();
            }
        }
    });

    ExperimentResult out;
    out.spec = spec;
    out.table = aggregate(spec, raw);
    out.raw = std::move(raw);
    return out;
}

}  // namespace kgroups
