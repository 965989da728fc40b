// Command-line front end: fit, bench, dermatology, validate, generate.
//
// Exit codes: 0 success, 2 bad input or usage, 3 data ingestion failure,
// 4 internal numeric invariant violation, 1 anything unexpected.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <kgroups/kgroups.hpp>

namespace {

using namespace kgroups;
namespace fs = std::filesystem;

struct FitOptions {
    std::string input;
    std::size_t k = 2;
    double alpha = 1.0;
    std::string mode = "first";
    std::size_t restarts = 10;
    std::size_t max_passes = 50;
    std::uint64_t seed = 1;
    std::string pairing = "sequential";
    std::size_t threads = 1;
    std::string out_dir;
    bool drop_missing = false;
};

nlohmann::json fit_json(const FitResult& r, const FitConfig& cfg, const io::CsvDataset& d) {
    nlohmann::json j;
    j["schema"] = "kgroups.fit/1";
    j["mode"] = std::string(to_string(cfg.mode));
    j["k"] = cfg.k;
    j["alpha"] = cfg.mode == FitMode::kmeans_alpha2 ? 2.0 : cfg.alpha.value();
    j["restarts"] = cfg.restarts;
    j["max_passes"] = cfg.max_passes;
    j["seed"] = cfg.seed;
    if (cfg.mode == FitMode::second_variation) j["pairing"] = std::string(to_string(cfg.pairing));
    j["n"] = d.data.rows();
    j["dropped_rows"] = d.source_rows - d.kept_rows.size();
    j["within"] = r.within;
    j["passes"] = r.passes;
    j["moves"] = r.moves;
    j["converged"] = r.converged;
    j["best_restart"] = r.best_restart;
    j["per_restart_within"] = r.per_restart_within;
    j["sizes"] = std::vector<std::size_t>(r.partition.sizes().begin(), r.partition.sizes().end());
    j["labels"] = std::vector<std::size_t>(r.partition.labels().begin(), r.partition.labels().end());
    return j;
}

int run_fit(const FitOptions& o) {
    io::CsvOptions csv;
    csv.drop_missing = o.drop_missing;
    const io::CsvDataset d = io::load_numeric_csv(o.input, csv);

    FitConfig cfg;
    cfg.k = o.k;
    cfg.mode = parse_fit_mode(o.mode);
    cfg.alpha = Alpha(cfg.mode == FitMode::kmeans_alpha2 ? 2.0 : o.alpha);
    cfg.restarts = o.restarts;
    cfg.max_passes = o.max_passes;
    cfg.seed = o.seed;
    cfg.pairing = parse_pairing(o.pairing);
    cfg.threads = o.threads;

    const FitResult r = fit(d.data, cfg);
    verify_within(r, d.data, cfg);

    nlohmann::json j = fit_json(r, cfg, d);
    if (d.labels) {
        const Partition truth = Partition::from_raw_labels(*d.labels);
        j["index"] = index_json(score(truth.labels(), r.partition.labels()));
    }
    const std::string labels_csv = io::format_label_csv(r.partition.labels(), d.source_rows, d.kept_rows);
    if (o.out_dir.empty()) {
        std::cout << labels_csv;
        std::cerr << j.dump(2) << "\n";
    } else {
        std::error_code ec;
        fs::create_directories(o.out_dir, ec);
        if (ec) throw IoError("cannot create output directory '" + o.out_dir + "': " + ec.message());
        io::write_file((fs::path(o.out_dir) / "labels.csv").string(), labels_csv);
        io::write_file((fs::path(o.out_dir) / "fit.json").string(), j.dump(2) + "\n");
        std::cout << "W=" << io::format_double(r.within) << " passes=" << r.passes << " moves=" << r.moves
                  << (r.converged ? "" : " (pass limit reached)") << "\n";
        if (j.contains("index")) std::cout << "crand=" << io::format_double(j["index"]["crand"].get<double>()) << "\n";
    }
    return 0;
}

struct BenchOptions {
    std::string spec_file;
    std::string family = "normal";
    std::size_t n = 200;
    std::size_t dim = 1;
    double separation = 3.0;
    std::string dataset;
    std::string sweep = "none";
    std::vector<double> values;
    std::vector<std::string> algorithms;
    std::size_t reps = 100;
    std::uint64_t seed = 1;
    std::optional<double> alpha;
    std::size_t k = 2;
    std::size_t restarts = 10;
    std::size_t max_passes = 50;
    std::string pairing = "sequential";
    bool no_timing = false;
    std::size_t threads = 0;
    std::string out_dir = "bench-out";
    std::vector<std::string> formats{"csv", "json", "svg"};
};

ExperimentSpec spec_from_flags(const BenchOptions& o) {
    ExperimentSpec s;
    s.design.family = parse_family(o.family);
    s.design.n = o.n;
    s.design.dim = o.dim;
    s.design.separation = o.separation;
    if (!o.dataset.empty()) s.dataset_path = o.dataset;
    s.sweep = parse_sweep(o.sweep);
    s.sweep_values = o.values;
    if (!o.algorithms.empty()) {
        s.algorithms.clear();
        for (const auto& a : o.algorithms) s.algorithms.push_back(parse_algorithm(a));
    }
    s.replicates = o.reps;
    s.base_seed = o.seed;
    s.alpha_policy.fixed = o.alpha;
    s.k = o.k;
    s.restarts = o.restarts;
    s.max_passes = o.max_passes;
    s.pairing = parse_pairing(o.pairing);
    s.record_timing = !o.no_timing;
    s.threads = o.threads;
    s.validate();
    return s;
}

int run_bench(const BenchOptions& o, const CLI::App& cmd) {
    ExperimentSpec spec;
    if (!o.spec_file.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(io::read_file(o.spec_file));
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError("spec file '" + o.spec_file + "' is not valid JSON: " + e.what());
        }
        spec = spec_from_json(j);
        // Flags given explicitly on the command line override the file.
        if (cmd.count("--reps")) spec.replicates = o.reps;
        if (cmd.count("--seed")) spec.base_seed = o.seed;
        if (cmd.count("--threads")) spec.threads = o.threads;
        if (cmd.count("--restarts")) spec.restarts = o.restarts;
        if (cmd.count("--no-timing")) spec.record_timing = false;
        spec.validate();
    } else {
        spec = spec_from_flags(o);
    }
    std::set<OutputFormat> formats;
    for (const auto& f : o.formats) formats.insert(parse_output_format(f));
    if (formats.empty()) throw InputError("no output format selected");

    const ExperimentResult r = run_experiment(spec);
    for (const auto& path : emit_outputs(r, o.out_dir, formats)) std::cout << "wrote " << path << "\n";
    std::size_t missing = 0;
    for (const auto& row : r.table.rows) missing += row.missing;
    if (missing) std::cerr << "warning: " << missing << " replicate fits failed; see raw_scores.csv\n";

    std::cout << "algorithm," << to_string(r.table.sweep) << ",crand_mean,crand_se\n";
    for (const auto& row : r.table.rows) {
        std::cout << to_string(row.algorithm) << "," << io::format_double(row.sweep_value) << ","
                  << io::format_double(row.crand.mean) << "," << io::format_double(row.crand.se) << "\n";
    }
    return 0;
}

struct DermatologyOptions {
    std::string path;
    std::string expected_hash;
    std::size_t restarts = 20;
    std::uint64_t seed = 1;
    std::vector<std::string> algorithms;
    std::string pairing = "sequential";
    std::string format = "csv";
    std::size_t threads = 1;
};

std::string default_dermatology_path() {
    if (const char* env = std::getenv("KGROUPS_DERMATOLOGY")) return env;
    return "data/dermatology.data";
}

int run_dermatology_cmd(const DermatologyOptions& o) {
    if (o.restarts == 0) throw InputError("restarts must be at least 1");
    const std::string path = o.path.empty() ? default_dermatology_path() : o.path;
    const DermatologyData d =
        load_dermatology(path, o.expected_hash.empty() ? std::nullopt : std::optional<std::string>(o.expected_hash));
    std::vector<Algorithm> algs(all_algorithms.begin(), all_algorithms.end());
    if (!o.algorithms.empty()) {
        algs.clear();
        for (const auto& a : o.algorithms) algs.push_back(parse_algorithm(a));
    }
    const auto reports = run_dermatology(d, algs, o.restarts, o.seed, parse_pairing(o.pairing), o.threads);

    if (o.format == "json") {
        nlohmann::json j;
        j["schema"] = "kgroups.dermatology/1";
        j["file_hash"] = d.hash;
        j["records"] = d.records;
        j["dropped"] = d.dropped;
        j["rows"] = d.sample.data.rows();
        j["restarts"] = o.restarts;
        j["seed"] = o.seed;
        for (const auto& r : reports) {
            nlohmann::json e = index_json(r.index);
            e["within"] = r.within;
            j["results"][std::string(to_string(r.algorithm))] = e;
        }
        std::cout << j.dump(2) << "\n";
    } else if (o.format == "csv") {
        std::cerr << "file hash " << d.hash << ", " << d.records << " records, " << d.dropped << " dropped\n";
        std::cout << "algorithm," << index_csv_header();
        for (const auto& r : reports) std::cout << to_string(r.algorithm) << "," << index_csv_row(r.index);
    } else {
        throw InputError("dermatology output format must be csv or json");
    }
    return 0;
}

struct ValidateOptions {
    std::string truth;
    std::string found;
    std::string format = "csv";
};

int run_validate(const ValidateOptions& o) {
    const auto a = io::load_label_csv(o.truth);
    const auto b = io::load_label_csv(o.found);
    if (a.size() != b.size()) {
        throw InputError("label files differ in length: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
    const Partition pa = Partition::from_raw_labels(a), pb = Partition::from_raw_labels(b);
    const IndexReport r = score(pa.labels(), pb.labels());
    if (o.format == "json") {
        std::cout << index_json(r).dump(2) << "\n";
    } else if (o.format == "csv") {
        std::cout << index_csv_header() << index_csv_row(r);
    } else {
        throw InputError("validate output format must be csv or json");
    }
    return 0;
}

struct GenerateOptions {
    std::string family = "normal";
    std::size_t n = 200;
    std::size_t dim = 1;
    double separation = 3.0;
    std::uint64_t seed = 1;
    std::string out;
};

int run_generate(const GenerateOptions& o) {
    const Family f = parse_family(o.family);
    const MixtureSpec spec = f == Family::cubic_uniform ? cubic_mixture(o.dim, o.n, o.seed)
                                                        : location_mixture(f, o.separation, o.n, o.dim, o.seed);
    const LabeledSample s = generate(spec);
    std::string csv;
    for (std::size_t c = 0; c < s.data.cols(); ++c) csv += "x" + std::to_string(c + 1) + ",";
    csv += "label\n";
    for (std::size_t i = 0; i < s.data.rows(); ++i) {
        for (double v : s.data.row(i)) csv += io::format_double(v) + ",";
        csv += std::to_string(s.truth[i]) + "\n";
    }
    if (o.out.empty()) {
        std::cout << csv;
    } else {
        io::write_file(o.out, csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-groups energy-distance clustering"};
    app.require_subcommand(1);

    FitOptions fo;
    auto* fit_cmd = app.add_subcommand("fit", "Cluster a numeric CSV; writes a label column and a fit summary");
    fit_cmd->add_option("input", fo.input, "CSV file (optional header, optional final 'label' column)")->required();
    fit_cmd->add_option("--k", fo.k, "Number of clusters")->capture_default_str();
    fit_cmd->add_option("--alpha", fo.alpha, "Distance exponent in (0, 2]")->capture_default_str();
    fit_cmd->add_option("--mode", fo.mode, "first | second | kmeans")->capture_default_str();
    fit_cmd->add_option("--restarts", fo.restarts, "Random restarts")->capture_default_str();
    fit_cmd->add_option("--max-passes", fo.max_passes, "Pass limit per restart")->capture_default_str();
    fit_cmd->add_option("--seed", fo.seed, "Random seed")->capture_default_str();
    fit_cmd->add_option("--pairing", fo.pairing, "Pairing for second variation: sequential | greedy")
        ->capture_default_str();
    fit_cmd->add_option("--threads", fo.threads, "Restart workers (0 = all cores)")->capture_default_str();
    fit_cmd->add_option("--out-dir", fo.out_dir, "Write labels.csv and fit.json here instead of stdout/stderr");
    fit_cmd->add_flag("--drop-missing", fo.drop_missing, "Skip rows with missing cells (their label is left empty)");

    BenchOptions bo;
    auto* bench_cmd = app.add_subcommand("bench", "Replicated simulation benchmark");
    bench_cmd->add_option("--spec", bo.spec_file, "Experiment spec as a JSON file");
    bench_cmd->add_option("--family", bo.family, "normal | lognormal | cauchy | cubic")->capture_default_str();
    bench_cmd->add_option("--n", bo.n, "Sample size per replicate")->capture_default_str();
    bench_cmd->add_option("--dim", bo.dim, "Dimension")->capture_default_str();
    bench_cmd->add_option("--separation", bo.separation, "Location of the second component")->capture_default_str();
    bench_cmd->add_option("--dataset", bo.dataset, "Labelled CSV to fit instead of simulating");
    bench_cmd->add_option("--sweep", bo.sweep, "none | separation | alpha | dimension")->capture_default_str();
    bench_cmd->add_option("--values", bo.values, "Sweep values, comma separated")->delimiter(',');
    bench_cmd->add_option("--algorithms", bo.algorithms, "Subset of kgroups_first,kgroups_second,kmeans")
        ->delimiter(',');
    bench_cmd->add_option("--reps", bo.reps, "Replicates per sweep value")->capture_default_str();
    bench_cmd->add_option("--seed", bo.seed, "Base seed; replicate b uses seed + b")->capture_default_str();
    bench_cmd->add_option("--alpha", bo.alpha, "Fixed k-groups exponent (default 0.5 for cauchy, else 1)");
    bench_cmd->add_option("--k", bo.k, "Number of clusters")->capture_default_str();
    bench_cmd->add_option("--restarts", bo.restarts, "Random restarts per fit")->capture_default_str();
    bench_cmd->add_option("--max-passes", bo.max_passes, "Pass limit per restart")->capture_default_str();
    bench_cmd->add_option("--pairing", bo.pairing, "sequential | greedy")->capture_default_str();
    bench_cmd->add_flag("--no-timing", bo.no_timing, "Record zero runtimes so outputs are byte-reproducible");
    bench_cmd->add_option("--threads", bo.threads, "Replicate workers (0 = all cores)")->capture_default_str();
    bench_cmd->add_option("--out-dir", bo.out_dir, "Output directory")->capture_default_str();
    bench_cmd->add_option("--format", bo.formats, "csv,json,svg (any subset)")->delimiter(',')->capture_default_str();

    DermatologyOptions dopt;
    auto* derm_cmd = app.add_subcommand("dermatology", "Six-cluster case study on the UCI dermatology file");
    derm_cmd->add_option("--path", dopt.path,
                         "Raw dermatology.data (default: $KGROUPS_DERMATOLOGY or data/dermatology.data)");
    derm_cmd->add_option("--expected-hash", dopt.expected_hash, "Reject the file unless its content hash matches");
    derm_cmd->add_option("--restarts", dopt.restarts, "Random restarts")->capture_default_str();
    derm_cmd->add_option("--seed", dopt.seed, "Random seed")->capture_default_str();
    derm_cmd->add_option("--algorithms", dopt.algorithms, "Subset of kgroups_first,kgroups_second,kmeans")
        ->delimiter(',');
    derm_cmd->add_option("--pairing", dopt.pairing, "sequential | greedy")->capture_default_str();
    derm_cmd->add_option("--format", dopt.format, "csv | json")->capture_default_str();
    derm_cmd->add_option("--threads", dopt.threads, "Distance matrix workers")->capture_default_str();

    ValidateOptions vo;
    auto* val_cmd = app.add_subcommand("validate", "Diag, Kappa, Rand and cRand between two label files");
    val_cmd->add_option("truth", vo.truth, "Reference labels CSV")->required();
    val_cmd->add_option("found", vo.found, "Found labels CSV")->required();
    val_cmd->add_option("--format", vo.format, "csv | json")->capture_default_str();

    GenerateOptions go;
    auto* gen_cmd = app.add_subcommand("generate", "Write a two-component simulation draw as labelled CSV");
    gen_cmd->add_option("--family", go.family, "normal | lognormal | cauchy | cubic")->capture_default_str();
    gen_cmd->add_option("--n", go.n, "Sample size")->capture_default_str();
    gen_cmd->add_option("--dim", go.dim, "Dimension")->capture_default_str();
    gen_cmd->add_option("--separation", go.separation, "Location of the second component")->capture_default_str();
    gen_cmd->add_option("--seed", go.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("--out", go.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fit_cmd) return run_fit(fo);
        if (*bench_cmd) return run_bench(bo, *bench_cmd);
        if (*derm_cmd) return run_dermatology_cmd(dopt);
        if (*val_cmd) return run_validate(vo);
        if (*gen_cmd) return run_generate(go);
    } catch (const kgroups::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
