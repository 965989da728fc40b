// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run only criterion N (1..9)
//
// The dermatology criterion reads the raw UCI file from $KGROUPS_DERMATOLOGY,
// else $KGROUPS_DATA_DIR/dermatology.data, else data/dermatology.data.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <kgroups/kgroups.hpp>

#include "../oracles.hpp"

namespace {

using namespace kgroups;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << std::fixed << x;
    return s.str();
}

std::string sci(double x) {
    std::ostringstream s;
    s.precision(2);
    s << std::scientific << x;
    return s.str();
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1 ------------------------------------------------------------------------
Outcome disco_identity() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(1);
    double worst = 0.0, min_between = 0.0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 5 + gen() % 96, k = 1 + gen() % 6, dim = 1 + gen() % 5;
        const double alpha = std::uniform_real_distribution<double>(0.05, 2.0)(gen);
        const auto pts = oracle::random_points(gen, n, dim);
        const DistanceCache cache(DataMatrix::from_rows(pts), Alpha(alpha));
        const Disco d = disco(Partition(oracle::random_labels(gen, n, std::min(k, n)), std::min(k, n)), cache);
        worst = std::max(worst, std::abs(d.total - (d.within + d.between)) / std::max(1.0, d.total));
        min_between = std::min(min_between, d.between);
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-10 && min_between >= 0.0 && secs < 10.0,
            "max |T-(W+B)|/max(1,T) = " + sci(worst) + ", min B = " + sci(min_between) + ", " + fmt(secs, 2) + " s"};
}

// 2 ------------------------------------------------------------------------
Outcome update_formula_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(2);
    const double alphas[] = {0.5, 1.0, 1.5, 2.0};
    double worst = 0.0;
    std::size_t checks = 0;
    for (int t = 0; t < 200; ++t) {
        const double alpha = alphas[t % 4];
        const std::size_t n = 12 + gen() % 40, k = 2 + gen() % 3;
        const auto pts = oracle::random_points(gen, n, 1 + gen() % 4);
        const auto labels = oracle::random_labels(gen, n, k);
        const DistanceCache cache(DataMatrix::from_rows(pts), Alpha(alpha));
        const Partition p(labels, k);
        const ClusterSumLedger ledger(cache, p);
        const double w0 = oracle::within(pts, labels, k, alpha);
        for (std::size_t m = 1; m <= 3; ++m) {
            std::size_t from = k;
            for (std::size_t c = 0; c < k; ++c)
                if (p.size(c) > m && (from == k || gen() % 2)) from = c;
            if (from == k) continue;
            auto members = p.members(from);
            std::shuffle(members.begin(), members.end(), gen);
            const std::vector<std::size_t> s(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(m));
            const std::size_t to = (from + 1 + gen() % (k - 1)) % k;
            auto after = labels;
            for (auto i : s) after[i] = to;
            const double expected = w0 - oracle::within(pts, after, k, alpha);
            const double scale = std::max(1.0, std::abs(expected));
            worst = std::max(worst, std::abs(mth_variation_delta(s, from, to, p, ledger) - expected) / scale);
            if (m == 1) {
                worst = std::max(worst, std::abs(first_variation_delta(s[0], from, to, p, ledger) - expected) / scale);
                ++checks;
            }
            ++checks;
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-9 && secs < 30.0,
            std::to_string(checks) + " comparisons, max relative error " + sci(worst) + ", " + fmt(secs, 2) + " s"};
}

// 3 ------------------------------------------------------------------------
Outcome alpha_two_equivalence() {
    std::mt19937_64 gen(3);
    double worst_objective = 0.0, worst_point = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 6 + gen() % 60, k = 1 + gen() % 5, dim = 1 + gen() % 4;
        const auto pts = oracle::random_points(gen, n, dim);
        const auto labels = oracle::random_labels(gen, n, k);
        const DistanceCache cache(DataMatrix::from_rows(pts), Alpha(2.0));
        const Partition p(labels, k);
        worst_objective = std::max(
            worst_objective, oracle::relative_gap(disco(p, cache).within, oracle::sum_of_squares(pts, labels, k)));

        // A point against a cluster it is not in.
        if (k < 2) continue;
        const std::size_t i = gen() % n;
        const std::size_t c = (labels[i] + 1) % k;
        const auto members = p.members(c);
        const double xi = two_sample_xi(std::vector<std::size_t>{i}, members, cache);
        const auto grp = oracle::groups(pts, labels, k);
        worst_point = std::max(worst_point, oracle::relative_gap(xi / 2.0, oracle::centroid_sq(pts[i], grp[c])));
    }

    std::size_t identical = 0;
    for (int t = 0; t < 20; ++t) {
        const auto pts = oracle::random_points(gen, 40 + 5 * t, 1 + t % 3);
        const DataMatrix m = DataMatrix::from_rows(pts);
        FitConfig cfg;
        cfg.k = 2 + t % 4;
        cfg.alpha = Alpha(2.0);
        cfg.seed = 100 + t;
        cfg.restarts = 3;
        cfg.record_trace = true;
        const FitResult a = fit_first_variation(m, cfg);
        const FitResult b = fit_kmeans_alpha2(m, cfg);
        bool same = a.traces.size() == b.traces.size() && a.partition == b.partition;
        for (std::size_t r = 0; same && r < a.traces.size(); ++r) {
            same = a.traces[r].size() == b.traces[r].size();
            for (std::size_t s = 0; same && s < a.traces[r].size(); ++s) {
                same = a.traces[r][s].point == b.traces[r][s].point && a.traces[r][s].from == b.traces[r][s].from &&
                       a.traces[r][s].to == b.traces[r][s].to;
            }
        }
        identical += same;
    }
    return {worst_objective <= 1e-9 && worst_point <= 1e-9 && identical == 20,
            "(a) max rel err " + sci(worst_objective) + "; (b) max rel err " + sci(worst_point) + "; (c) " +
                std::to_string(identical) + "/20 identical move traces"};
}

// 4-7 ----------------------------------------------------------------------
ExperimentSpec design(Family f, std::size_t dim, double separation) {
    ExperimentSpec s;
    s.design = {f, 200, dim, separation};
    s.replicates = 100;
    s.restarts = 10;
    s.base_seed = 1;
    s.record_timing = false;
    s.threads = 0;
    return s;
}

double mean_crand(const ExperimentResult& r, Algorithm a, double v = std::numeric_limits<double>::quiet_NaN()) {
    const ResultRow* row = r.table.find(a, v);
    if (!row || row->missing) return std::numeric_limits<double>::quiet_NaN();
    return row->crand.mean;
}

std::string triple(double first, double second, double kmeans) {
    return "first " + fmt(first) + ", second " + fmt(second) + ", kmeans " + fmt(kmeans);
}

Outcome normal_parity() {
    const auto t0 = Clock::now();
    const auto r = run_experiment(design(Family::normal, 1, 3.0));
    const double f = mean_crand(r, Algorithm::kgroups_first), s = mean_crand(r, Algorithm::kgroups_second),
                 k = mean_crand(r, Algorithm::kmeans);
    const double spread = std::max({f, s, k}) - std::min({f, s, k});
    return {spread <= 0.05, triple(f, s, k) + ", spread " + fmt(spread) + ", " + fmt(seconds_since(t0), 1) + " s"};
}

Outcome lognormal_dominance() {
    const auto r = run_experiment(design(Family::lognormal, 1, 3.0));
    const double f = mean_crand(r, Algorithm::kgroups_first), s = mean_crand(r, Algorithm::kgroups_second),
                 k = mean_crand(r, Algorithm::kmeans);
    return {f - k >= 0.05 && s - k >= 0.05, triple(f, s, k)};
}

Outcome cauchy_robustness() {
    const auto r = run_experiment(design(Family::cauchy, 1, 3.0));
    const double f = mean_crand(r, Algorithm::kgroups_first), s = mean_crand(r, Algorithm::kgroups_second),
                 k = mean_crand(r, Algorithm::kmeans);
    return {f > k && s > k, triple(f, s, k) + " (k-groups alpha " + fmt(r.raw.front().alpha, 1) + ")"};
}

Outcome cubic_dimension() {
    ExperimentSpec spec = design(Family::cubic_uniform, 1, 0.0);
    spec.sweep = SweepParameter::dimension;
    spec.sweep_values = {20.0, 40.0};
    const auto r = run_experiment(spec);
    const double f20 = mean_crand(r, Algorithm::kgroups_first, 20), s20 = mean_crand(r, Algorithm::kgroups_second, 20),
                 k20 = mean_crand(r, Algorithm::kmeans, 20), f40 = mean_crand(r, Algorithm::kgroups_first, 40);
    const bool pass = f20 >= 0.95 && k20 <= 0.15 && s20 >= 0.10 && s20 <= 0.40 && k20 < s20 && s20 < f20 &&
                      f40 >= 0.99;
    return {pass, "d=20: " + triple(f20, s20, k20) + "; d=40: first " + fmt(f40)};
}

// 8 ------------------------------------------------------------------------
std::string dermatology_path() {
    if (const char* p = std::getenv("KGROUPS_DERMATOLOGY")) return p;
    if (const char* d = std::getenv("KGROUPS_DATA_DIR")) return std::string(d) + "/dermatology.data";
    return "data/dermatology.data";
}

Outcome dermatology_case() {
    const auto t0 = Clock::now();
    const std::string path = dermatology_path();
    DermatologyData d;
    try {
        d = load_dermatology(path);
    } catch (const Error& e) {
        return {false, std::string("dermatology data unavailable (") + e.what() + ")"};
    }
    if (d.sample.data.rows() != 358) {
        return {false, "expected 358 complete records, file gives " + std::to_string(d.sample.data.rows())};
    }
    const auto reports = run_dermatology(d, {Algorithm::kgroups_first, Algorithm::kmeans}, 20, 1);
    const IndexReport& f = reports[0].index;
    const IndexReport& k = reports[1].index;
    const double secs = seconds_since(t0);
    const bool pass = f.crand >= 0.88 && f.crand <= 0.95 && f.rand >= 0.96 && f.rand <= 0.98 && k.crand >= 0.78 &&
                      k.crand <= 0.88 && secs < 300.0;
    return {pass, "first cRand " + fmt(f.crand) + " Rand " + fmt(f.rand) + ", kmeans cRand " + fmt(k.crand) + ", " +
                      fmt(secs, 1) + " s"};
}

// 9 ------------------------------------------------------------------------
Outcome property_suite() {
    std::vector<std::string> failures;
    std::mt19937_64 gen(9);

    // Descent and termination on every mode.
    std::size_t fits = 0;
    for (int t = 0; t < 30; ++t) {
        const auto pts = oracle::random_points(gen, 30 + 3 * t, 1 + t % 3);
        const DataMatrix m = DataMatrix::from_rows(pts);
        for (FitMode mode : {FitMode::first_variation, FitMode::second_variation, FitMode::kmeans_alpha2}) {
            FitConfig cfg;
            cfg.k = 2 + t % 4;
            cfg.alpha = Alpha(0.5 + 0.5 * (t % 4));
            cfg.mode = mode;
            cfg.seed = t;
            cfg.restarts = 2;
            cfg.max_passes = 1 + t % 10;
            cfg.record_trace = true;
            const FitResult r = fit(m, cfg);
            ++fits;
            if (r.passes > cfg.max_passes) failures.push_back("pass limit exceeded");
            for (const auto& trace : r.traces)
                for (std::size_t s = 1; s < trace.size(); ++s)
                    if (!(trace[s].objective < trace[s - 1].objective)) failures.push_back("W rose after a move");
        }
    }

    // Seed determinism: identical specs give identical bytes.
    ExperimentSpec spec = design(Family::lognormal, 2, 2.0);
    spec.replicates = 5;
    spec.design.n = 60;
    spec.sweep = SweepParameter::separation;
    spec.sweep_values = {1.0, 3.0};
    const auto a = run_experiment(spec);
    spec.threads = 1;
    const auto b = run_experiment(spec);
    if (results_csv(a.table) != results_csv(b.table) || results_json(a) != results_json(b) ||
        raw_scores_csv(a.raw, a.table.sweep) != raw_scores_csv(b.raw, b.table.sweep)) {
        failures.push_back("outputs differ between identical runs");
    }

    // Brute-force index agreement for every pair of set partitions, n <= 7.
    std::size_t pairs = 0;
    for (std::size_t n = 2; n <= 7; ++n) {
        const auto parts = oracle::all_set_partitions(n, n);
        for (const auto& x : parts)
            for (const auto& y : parts) {
                const auto t = contingency(x, y);
                const auto o = oracle::pair_indices(x, y);
                if (std::abs(rand_index(t) - o.rand) > 1e-12 || std::abs(adjusted_rand(t) - o.adjusted) > 1e-12) {
                    failures.push_back("index mismatch at n=" + std::to_string(n));
                }
                ++pairs;
            }
    }

    // Null distribution of the adjusted Rand index.
    std::bernoulli_distribution coin(0.5);
    double null_sum = 0.0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<std::size_t> x(200), y(200);
        for (auto& v : x) v = coin(gen);
        for (auto& v : y) v = coin(gen);
        null_sum += adjusted_rand(contingency(x, y));
    }
    const double null_mean = null_sum / 1000.0;
    if (std::abs(null_mean) > 0.02) failures.push_back("null cRand mean " + fmt(null_mean));

    std::string detail = std::to_string(fits) + " fits descend and stop in budget, outputs reproducible, " +
                         std::to_string(pairs) + " partition pairs match, null cRand mean " + fmt(null_mean);
    if (!failures.empty()) detail = failures.front() + " (" + std::to_string(failures.size()) + " failures)";
    return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"disco identity T = W + B", disco_identity},
        {"update formulas vs recomputation", update_formula_oracle},
        {"alpha = 2 equals k-means", alpha_two_equivalence},
        {"normal mixture parity", normal_parity},
        {"lognormal mixture dominance", lognormal_dominance},
        {"cauchy mixture robustness", cauchy_robustness},
        {"cubic mixture in 20 and 40 dimensions", cubic_dimension},
        {"dermatology case study", dermatology_case},
        {"property suite", property_suite},
    };

    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            const long c = std::strtol(argv[++i], nullptr, 10);
            if (c < 1 || c > static_cast<long>(criteria.size())) {
                std::cerr << "criterion must be between 1 and " << criteria.size() << "\n";
                return 2;
            }
            selected.push_back(static_cast<std::size_t>(c));
        } else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }
    if (selected.empty())
        for (std::size_t c = 1; c <= criteria.size(); ++c) selected.push_back(c);

    bool all = true;
    for (std::size_t c : selected) {
        Outcome o;
        try {
            o = criteria[c - 1].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << "criterion " << c << " [" << criteria[c - 1].first << "]: " << (o.pass ? "PASS" : "FAIL") << ": "
                  << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
