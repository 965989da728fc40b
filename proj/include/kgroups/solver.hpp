#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "data_matrix.hpp"
#include "energy.hpp"
#include "error.hpp"
#include "ledger.hpp"
#include "parallel.hpp"
#include "partition.hpp"
#include "random.hpp"
#include "summation.hpp"

namespace kgroups {

enum class FitMode { first_variation, second_variation, kmeans_alpha2 };

/// How second variation forms its fixed point pairs.
enum class Pairing {
    /// Each unpaired point, in index order, takes its nearest unpaired
    /// neighbour.
    sequential_nearest,
    /// Repeatedly take the globally closest pair among unpaired points.
    greedy_global,
};

inline std::string_view to_string(Pairing p) {
    return p == Pairing::sequential_nearest ? "sequential" : "greedy";
}

inline Pairing parse_pairing(std::string_view s) {
    if (s == "sequential" || s == "sequential_nearest") return Pairing::sequential_nearest;
    if (s == "greedy" || s == "greedy_global") return Pairing::greedy_global;
    throw InputError("unknown pairing rule '" + std::string(s) + "' (expected sequential or greedy)");
}

inline std::string_view to_string(FitMode m) {
    switch (m) {
        case FitMode::first_variation: return "first";
        case FitMode::second_variation: return "second";
        case FitMode::kmeans_alpha2: return "kmeans";
    }
    return "?";
}

inline FitMode parse_fit_mode(std::string_view s) {
    if (s == "first" || s == "first_variation") return FitMode::first_variation;
    if (s == "second" || s == "second_variation") return FitMode::second_variation;
    if (s == "kmeans" || s == "kmeans_alpha2") return FitMode::kmeans_alpha2;
    throw InputError("unknown fit mode '" + std::string(s) + "' (expected first, second or kmeans)");
}

struct FitConfig {
    std::size_t k = 2;
    Alpha alpha{1.0};
    std::size_t restarts = 10;
    std::size_t max_passes = 50;
    std::uint64_t seed = 0;
    FitMode mode = FitMode::first_variation;
    Pairing pairing = Pairing::sequential_nearest;
    /// Workers for restarts; 0 means one per hardware thread.
    std::size_t threads = 1;
    /// Keep the relocation log of every restart in the result.
    bool record_trace = false;

    void validate(std::size_t n) const {
        if (k == 0) throw InputError("K must be at least 1");
        if (k > n) throw InputError("K=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
        if (restarts == 0) throw InputError("restarts must be at least 1");
        if (max_passes == 0) throw InputError("max_passes must be at least 1");
    }
};

/// One accepted relocation. `partner` is set for pair moves.
struct MoveRecord {
    static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    std::size_t point = 0;
    std::size_t partner = none;
    std::size_t from = 0;
    std::size_t to = 0;
    double gain = 0.0;       ///< E1 - E2, the predicted drop in W
    double objective = 0.0;  ///< W after the move
};

struct FitResult {
    Partition partition;
    double within = 0.0;  ///< W at convergence for the kept restart
    std::size_t passes = 0;
    std::size_t moves = 0;
    bool converged = true;
    std::uint64_t seed = 0;
    std::size_t best_restart = 0;
    std::vector<double> per_restart_within;
    std::vector<std::vector<MoveRecord>> traces;  ///< per restart, when requested
};

/// Weight on the statistic between m leaving points and their cluster of
/// size n_from: m n / (2 (n - m)).
inline double removal_weight(std::size_t n_from, std::size_t m) {
    const double n = static_cast<double>(n_from);
    const double md = static_cast<double>(m);
    return md * n / (2.0 * (n - md));
}

/// Weight on the statistic between m arriving points and the receiving
/// cluster of size n_to: m n / (2 (n + m)).
inline double insertion_weight(std::size_t n_to, std::size_t m) {
    const double n = static_cast<double>(n_to);
    const double md = static_cast<double>(m);
    return md * n / (2.0 * (n + md));
}

/// W(P) - W(P') for moving point i from `from` to `to`. Positive means the
/// move lowers W.
inline double first_variation_delta(std::size_t i, std::size_t from, std::size_t to, const Partition& p,
                                    const ClusterSumLedger& ledger) {
    if (i >= p.n() || from >= p.k() || to >= p.k()) throw InputError("point or cluster index out of range");
    if (p.label(i) != from) throw InputError("point " + std::to_string(i) + " is not in cluster " + std::to_string(from));
    if (from == to) throw RejectedMove("source and target cluster coincide");
    if (p.size(from) < 2) throw RejectedMove("moving point " + std::to_string(i) + " would empty its cluster");
    return removal_weight(p.size(from), 1) * ledger.point_xi(i, from, p) -
           insertion_weight(p.size(to), 1) * ledger.point_xi(i, to, p);
}

/// W(P) - W(P') for moving the point set `s` (all in `from`) to `to`.
inline double mth_variation_delta(std::span<const std::size_t> s, std::size_t from, std::size_t to,
                                  const Partition& p, const ClusterSumLedger& ledger) {
    if (s.empty()) throw InputError("point set is empty");
    if (from >= p.k() || to >= p.k()) throw InputError("cluster index out of range");
    if (from == to) throw RejectedMove("source and target cluster coincide");
    std::vector<std::size_t> sorted(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InputError("point set has duplicates");
    for (std::size_t i : s) {
        if (i >= p.n()) throw InputError("point index " + std::to_string(i) + " out of range");
        if (p.label(i) != from) {
            throw InputError("point " + std::to_string(i) + " is not in cluster " + std::to_string(from));
        }
    }
    const std::size_t m = s.size();
    if (m >= p.size(from)) {
        throw RejectedMove("moving " + std::to_string(m) + " points would empty cluster " + std::to_string(from));
    }
    return removal_weight(p.size(from), m) * ledger.set_xi(s, from, p) -
           insertion_weight(p.size(to), m) * ledger.set_xi(s, to, p);
}

/// Points paired by repeatedly taking the closest pair among those not yet
/// paired (ties by lower indices). `skip` is left out; pass `n` for none.
inline std::vector<std::pair<std::size_t, std::size_t>> greedy_pairs(const DistanceCache& cache, std::size_t skip) {
    const std::size_t n = cache.n();
    struct Candidate {
        double d;
        std::size_t i;
        std::size_t j;
    };
    std::vector<Candidate> all;
    all.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == skip) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j != skip) all.push_back({cache(i, j), i, j});
        }
    }
    std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    std::vector<char> used(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n / 2);
    for (const auto& c : all) {
        if (used[c.i] || used[c.j]) continue;
        used[c.i] = used[c.j] = 1;
        pairs.emplace_back(c.i, c.j);
    }
    return pairs;
}

/// Sum over clusters of squared Euclidean deviations from the centroid.
inline double within_sum_of_squares(const DataMatrix& data, const Partition& p) {
    const std::size_t dim = data.cols();
    std::vector<double> centroid(p.k() * dim, 0.0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t d = 0; d < dim; ++d) centroid[p.label(i) * dim + d] += data(i, d);
    }
    for (std::size_t c = 0; c < p.k(); ++c) {
        for (std::size_t d = 0; d < dim; ++d) centroid[c * dim + d] /= static_cast<double>(p.size(c));
    }
    CompensatedSum s;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double t = data(i, d) - centroid[p.label(i) * dim + d];
            s += t * t;
        }
    }
    return s.value();
}

/// Each unpaired point in index order is paired with its nearest unpaired
/// neighbour (ties to the lower index). `skip` is left out; pass `n` for
/// none.
inline std::vector<std::pair<std::size_t, std::size_t>> sequential_pairs(const DistanceCache& cache,
                                                                         std::size_t skip) {
    const std::size_t n = cache.n();
    std::vector<char> used(n, 0);
    if (skip < n) used[skip] = 1;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        std::size_t best = n;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j] || j == i) continue;
            if (cache(i, j) < best_d) {
                best_d = cache(i, j);
                best = j;
            }
        }
        if (best == n) break;
        used[i] = used[best] = 1;
        pairs.emplace_back(i, best);
    }
    return pairs;
}

inline std::vector<std::pair<std::size_t, std::size_t>> make_pairs(const DistanceCache& cache, std::size_t skip,
                                                                   Pairing rule) {
    return rule == Pairing::greedy_global ? greedy_pairs(cache, skip) : sequential_pairs(cache, skip);
}

namespace detail {

struct RestartRun {
    Partition partition;
    double within = 0.0;
    std::size_t passes = 0;
    std::size_t moves = 0;
    bool converged = false;
    std::vector<MoveRecord> trace;
};

struct SweepStats {
    std::size_t passes = 0;
    std::size_t moves = 0;
    bool converged = false;
};

/// Visits units 0..units-1 cyclically. Stops once `units` consecutive visits
/// relocate nothing, or after `max_passes` passes.
template <class TryUnit, class PassStart>
SweepStats sweep_until_stable(std::size_t units, std::size_t max_passes, TryUnit&& try_unit, PassStart&& pass_start) {
    SweepStats st;
    std::size_t idle = 0;
    while (st.passes < max_passes && !st.converged) {
        pass_start(st.passes);
        ++st.passes;
        for (std::size_t u = 0; u < units; ++u) {
            if (try_unit(u)) {
                ++st.moves;
                idle = 0;
            } else if (++idle >= units) {
                st.converged = true;
                break;
            }
        }
    }
    return st;
}

/// Cheapest cluster other than `from` by `cost`, ties to the lowest id.
template <class Cost>
std::pair<std::size_t, double> cheapest_other(std::size_t k, std::size_t from, Cost&& cost) {
    std::size_t best = from;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        if (c == from) continue;
        const double v = cost(c);
        if (v < best_cost) {
            best_cost = v;
            best = c;
        }
    }
    return {best, best_cost};
}

/// First-variation descent from a given starting partition.
inline RestartRun first_variation_descent(const DistanceCache& cache, Partition p, std::size_t max_passes,
                                          bool trace) {
    RestartRun run;
    const std::size_t k = p.k();
    ClusterSumLedger ledger(cache, p);

    auto try_point = [&](std::size_t i) {
        const std::size_t from = p.label(i);
        if (p.size(from) < 2) return false;
        const double e1 = removal_weight(p.size(from), 1) * ledger.point_xi(i, from, p);
        const auto [to, e2] =
            cheapest_other(k, from, [&](std::size_t c) { return insertion_weight(p.size(c), 1) * ledger.point_xi(i, c, p); });
        if (!(e1 > e2)) return false;
        move_point(p, ledger, i, to);
        if (trace) run.trace.push_back({i, MoveRecord::none, from, to, e1 - e2, ledger.objective(p)});
        return true;
    };
    auto refresh = [&](std::size_t pass) {
        if (pass > 0) ledger.rebuild(p);
    };
    const auto st = sweep_until_stable(cache.n(), max_passes, try_point, refresh);

    ledger.rebuild(p);
    run.within = ledger.objective(p);
    run.passes = st.passes;
    run.moves = st.moves;
    run.converged = st.converged;
    run.partition = std::move(p);
    return run;
}

inline RestartRun first_variation_run(const DistanceCache& cache, std::size_t k, std::size_t max_passes,
                                      std::uint64_t seed, bool trace) {
    return first_variation_descent(cache, random_partition(cache.n(), k, seed), max_passes, trace);
}

inline RestartRun second_variation_run(const DistanceCache& cache, std::size_t k, std::size_t max_passes,
                                       std::uint64_t seed, bool trace, Pairing rule) {
    const std::size_t n = cache.n();
    Rng rng(seed);
    const std::size_t held = (n % 2 == 1) ? static_cast<std::size_t>(rng.below(n)) : n;
    const auto pairs = make_pairs(cache, held, rule);
    const std::size_t np = pairs.size();
    if (np < k) {
        throw InputError("second variation needs at least K=" + std::to_string(k) + " point pairs, have " +
                         std::to_string(np));
    }

    // Paired points laid out as (a0, b0, a1, b1, ...) in a sub-problem.
    std::vector<std::size_t> order;
    order.reserve(2 * np);
    for (const auto& [a, b] : pairs) {
        order.push_back(a);
        order.push_back(b);
    }
    const Partition pair_labels = random_partition(np, k, derive_seed(seed, 1));
    std::vector<std::size_t> sub_labels(2 * np);
    for (std::size_t q = 0; q < np; ++q) sub_labels[2 * q] = sub_labels[2 * q + 1] = pair_labels.label(q);
    Partition p(std::move(sub_labels), k);
    const DistanceCache sub = cache.subset(order);
    ClusterSumLedger ledger(sub, p);

    RestartRun run;
    auto try_pair = [&](std::size_t q) {
        const std::size_t members[2] = {2 * q, 2 * q + 1};
        const std::size_t from = p.label(members[0]);
        if (p.size(from) < 3) return false;
        const double e1 = removal_weight(p.size(from), 2) * ledger.set_xi(members, from, p);
        const auto [to, e2] = cheapest_other(
            k, from, [&](std::size_t c) { return insertion_weight(p.size(c), 2) * ledger.set_xi(members, c, p); });
        if (!(e1 > e2)) return false;
        move_point(p, ledger, members[0], to);
        move_point(p, ledger, members[1], to);
        if (trace) {
            run.trace.push_back({order[members[0]], order[members[1]], from, to, e1 - e2, ledger.objective(p)});
        }
        return true;
    };
    auto refresh = [&](std::size_t pass) {
        if (pass > 0) ledger.rebuild(p);
    };
    const auto st = sweep_until_stable(np, max_passes, try_pair, refresh);

    // Map back to original indices; the held-out point joins the cluster
    // where adding it raises W the least.
    std::vector<std::size_t> labels(n, 0);
    for (std::size_t s = 0; s < order.size(); ++s) labels[order[s]] = p.label(s);
    if (held < n) {
        std::vector<CompensatedSum> to_cluster(k);
        std::vector<CompensatedSum> within(k);
        std::vector<double> size(k, 0.0);
        for (std::size_t s = 0; s < order.size(); ++s) {
            const std::size_t c = p.label(s);
            to_cluster[c] += cache(held, order[s]);
            size[c] += 1.0;
        }
        for (std::size_t c = 0; c < k; ++c) within[c] += ledger.within(c);
        const auto [to, cost] = cheapest_other(k, k, [&](std::size_t c) {
            const double xi = 2.0 * to_cluster[c].value() / size[c] - 2.0 * within[c].value() / (size[c] * size[c]);
            return insertion_weight(p.size(c), 1) * xi;
        });
        (void)cost;
        labels[held] = to;
    }

    run.partition = Partition(std::move(labels), k);
    ClusterSumLedger full(cache, run.partition);
    run.within = full.objective(run.partition);
    run.passes = st.passes;
    run.moves = st.moves;
    run.converged = st.converged;
    return run;
}

/// Centroid form of the alpha = 2 rule: the removal cost is
/// n/(n-1) |x - c_from|^2 and the insertion cost n/(n+1) |x - c_to|^2.
inline RestartRun kmeans_run(const DataMatrix& data, std::size_t k, std::size_t max_passes, std::uint64_t seed,
                             bool trace) {
    const std::size_t n = data.rows();
    const std::size_t dim = data.cols();
    Partition p = random_partition(n, k, seed);
    std::vector<double> sums(k * dim, 0.0);
    std::vector<double> squares(k, 0.0);

    auto recompute = [&] {
        std::vector<CompensatedSum> s(k * dim);
        std::vector<CompensatedSum> q(k);
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = data.row(i);
            const std::size_t c = p.label(i);
            for (std::size_t d = 0; d < dim; ++d) {
                s[c * dim + d] += x[d];
                q[c] += x[d] * x[d];
            }
        }
        for (std::size_t t = 0; t < k * dim; ++t) sums[t] = s[t].value();
        for (std::size_t c = 0; c < k; ++c) squares[c] = q[c].value();
    };
    auto centroid_gap = [&](std::size_t i, std::size_t c) {
        const auto x = data.row(i);
        const double nc = static_cast<double>(p.size(c));
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double t = x[d] - sums[c * dim + d] / nc;
            s += t * t;
        }
        return s;
    };
    auto sse = [&] {
        double total = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            double norm = 0.0;
            for (std::size_t d = 0; d < dim; ++d) norm += sums[c * dim + d] * sums[c * dim + d];
            total += squares[c] - norm / static_cast<double>(p.size(c));
        }
        return total;
    };

    RestartRun run;
    recompute();
    auto try_point = [&](std::size_t i) {
        const std::size_t from = p.label(i);
        const std::size_t n_from = p.size(from);
        if (n_from < 2) return false;
        const double e1 = static_cast<double>(n_from) / static_cast<double>(n_from - 1) * centroid_gap(i, from);
        const auto [to, e2] = cheapest_other(k, from, [&](std::size_t c) {
            const double nc = static_cast<double>(p.size(c));
            return nc / (nc + 1.0) * centroid_gap(i, c);
        });
        if (!(e1 > e2)) return false;
        const auto x = data.row(i);
        for (std::size_t d = 0; d < dim; ++d) {
            sums[from * dim + d] -= x[d];
            sums[to * dim + d] += x[d];
            squares[from] -= x[d] * x[d];
            squares[to] += x[d] * x[d];
        }
        p.move(i, to);
        if (trace) run.trace.push_back({i, MoveRecord::none, from, to, e1 - e2, sse()});
        return true;
    };
    auto refresh = [&](std::size_t pass) {
        if (pass > 0) recompute();
    };
    const auto st = sweep_until_stable(n, max_passes, try_point, refresh);

    run.within = within_sum_of_squares(data, p);
    run.passes = st.passes;
    run.moves = st.moves;
    run.converged = st.converged;
    run.partition = std::move(p);
    return run;
}

inline FitResult singleton_result(std::size_t n, const FitConfig& cfg) {
    std::vector<std::size_t> labels(n);
    std::iota(labels.begin(), labels.end(), std::size_t{0});
    FitResult r;
    r.partition = Partition(std::move(labels), n);
    r.seed = cfg.seed;
    r.passes = 0;
    r.per_restart_within.assign(cfg.restarts, 0.0);
    if (cfg.record_trace) r.traces.assign(cfg.restarts, {});
    return r;
}

template <class Run>
FitResult best_of_restarts(const FitConfig& cfg, Run&& run_one) {
    std::vector<RestartRun> runs(cfg.restarts);
    parallel_for(cfg.restarts, cfg.threads, [&](std::size_t r) { runs[r] = run_one(derive_seed(cfg.seed, r)); });

    FitResult out;
    out.seed = cfg.seed;
    out.per_restart_within.reserve(runs.size());
    std::size_t best = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        out.per_restart_within.push_back(runs[r].within);
        if (runs[r].within < runs[best].within) best = r;
    }
    out.best_restart = best;
    out.within = runs[best].within;
    out.passes = runs[best].passes;
    out.moves = runs[best].moves;
    out.converged = runs[best].converged;
    if (cfg.record_trace) {
        out.traces.reserve(runs.size());
        for (auto& r : runs) out.traces.push_back(std::move(r.trace));
    }
    out.partition = std::move(runs[best].partition);
    return out;
}

}  // namespace detail

/// k-groups by first variation over a prebuilt cache.
inline FitResult fit_first_variation(const DistanceCache& cache, const FitConfig& cfg) {
    cfg.validate(cache.n());
    if (cfg.alpha != cache.alpha()) throw InputError("configured alpha differs from the cache's alpha");
    if (cfg.k == cache.n()) return detail::singleton_result(cache.n(), cfg);
    return detail::best_of_restarts(cfg, [&](std::uint64_t s) {
        return detail::first_variation_run(cache, cfg.k, cfg.max_passes, s, cfg.record_trace);
    });
}

inline FitResult fit_first_variation(const DataMatrix& data, const FitConfig& cfg) {
    cfg.validate(data.rows());
    const DistanceCache cache(data, cfg.alpha, cfg.threads);
    return fit_first_variation(cache, cfg);
}

/// k-groups by second variation over a prebuilt cache.
inline FitResult fit_second_variation(const DistanceCache& cache, const FitConfig& cfg) {
    cfg.validate(cache.n());
    if (cfg.alpha != cache.alpha()) throw InputError("configured alpha differs from the cache's alpha");
    if (cfg.k == cache.n()) return detail::singleton_result(cache.n(), cfg);
    return detail::best_of_restarts(cfg, [&](std::uint64_t s) {
        return detail::second_variation_run(cache, cfg.k, cfg.max_passes, s, cfg.record_trace, cfg.pairing);
    });
}

inline FitResult fit_second_variation(const DataMatrix& data, const FitConfig& cfg) {
    cfg.validate(data.rows());
    const DistanceCache cache(data, cfg.alpha, cfg.threads);
    return fit_second_variation(cache, cfg);
}

/// The alpha = 2 instance run through maintained centroids. Seeds and visit
/// order match `fit_first_variation` with alpha = 2, so both take the same
/// moves. `cfg.alpha` is ignored.
inline FitResult fit_kmeans_alpha2(const DataMatrix& data, const FitConfig& cfg) {
    cfg.validate(data.rows());
    if (cfg.k == data.rows()) return detail::singleton_result(data.rows(), cfg);
    return detail::best_of_restarts(cfg, [&](std::uint64_t s) {
        return detail::kmeans_run(data, cfg.k, cfg.max_passes, s, cfg.record_trace);
    });
}

/// Recomputes W of the returned partition from scratch (the within-cluster
/// sum of squares for the centroid path) and throws InvariantViolation if
/// the reported value drifted by more than `tolerance` relative.
inline void verify_within(const FitResult& r, const DataMatrix& data, const FitConfig& cfg,
                          double tolerance = 1e-9) {
    double expected = 0.0;
    if (cfg.mode == FitMode::kmeans_alpha2) {
        expected = within_sum_of_squares(data, r.partition);
    } else {
        expected = disco(r.partition, DistanceCache(data, cfg.alpha, cfg.threads)).within;
    }
    const double scale = std::max(1.0, std::max(std::abs(expected), std::abs(r.within)));
    if (!(std::abs(expected - r.within) <= tolerance * scale)) {
        throw InvariantViolation("reported within-cluster dispersion " + std::to_string(r.within) +
                                 " differs from recomputed " + std::to_string(expected));
    }
}

inline FitResult fit(const DataMatrix& data, const FitConfig& cfg) {
    switch (cfg.mode) {
        case FitMode::first_variation: return fit_first_variation(data, cfg);
        case FitMode::second_variation: return fit_second_variation(data, cfg);
        case FitMode::kmeans_alpha2: return fit_kmeans_alpha2(data, cfg);
    }
    throw InputError("unknown fit mode");
}

}  // namespace kgroups
