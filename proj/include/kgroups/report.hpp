#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "harness.hpp"
#include "io.hpp"

namespace kgroups {

inline constexpr const char* results_schema = "kgroups.results/1";

enum class OutputFormat { csv, json, svg };

inline OutputFormat parse_output_format(std::string_view s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    if (s == "svg") return OutputFormat::svg;
    throw InputError("unknown output format '" + std::string(s) + "'");
}

namespace detail {

inline const char* const result_columns[] = {"algorithm", "count",     "missing",  "diag_mean", "diag_se",
                                             "kappa_mean", "kappa_se", "rand_mean", "rand_se",  "crand_mean",
                                             "crand_se",   "runtime_ms"};

inline double parse_cell(const std::string& s) {
    if (s == "NA") return std::numeric_limits<double>::quiet_NaN();
    const auto v = io::parse_double(s);
    if (!v && s == "inf") return std::numeric_limits<double>::infinity();
    if (!v) throw IngestionError("bad number '" + s + "' in results CSV");
    return *v;
}

inline nlohmann::json stat_json(const IndexStat& s) {
    nlohmann::json j;
    j["mean"] = std::isnan(s.mean) ? nlohmann::json(nullptr) : nlohmann::json(s.mean);
    j["se"] = std::isnan(s.se) ? nlohmann::json(nullptr) : nlohmann::json(s.se);
    return j;
}

inline nlohmann::json number_or_null(double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); }

}  // namespace detail

/// One row per (algorithm, sweep value). The sweep column is named after
/// the swept parameter; NaN cells (undefined se, unnamed sweep point) are
/// written as NA.
inline std::string results_csv(const ResultTable& t) {
    std::string out = "algorithm," + std::string(to_string(t.sweep));
    for (std::size_t c = 1; c < std::size(detail::result_columns); ++c) out += std::string(",") + detail::result_columns[c];
    out += "\n";
    for (const auto& r : t.rows) {
        out += std::string(to_string(r.algorithm)) + "," + io::format_double(r.sweep_value) + "," +
               std::to_string(r.count) + "," + std::to_string(r.missing);
        for (const IndexStat* s : {&r.diag, &r.kappa, &r.rand, &r.crand}) {
            out += "," + io::format_double(s->mean) + "," + io::format_double(s->se);
        }
        out += "," + io::format_double(r.mean_runtime_ms) + "\n";
    }
    return out;
}

inline ResultTable parse_results_csv(std::string_view text) {
    const auto lines = io::lines_of(text);
    if (lines.empty()) throw IngestionError("results CSV is empty");
    const auto header = io::split_fields(lines[0]);
    if (header.size() != std::size(detail::result_columns) + 1 || header[0] != "algorithm") {
        throw IngestionError("results CSV header is not recognised");
    }
    ResultTable t;
    t.sweep = parse_sweep(header[1]);
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto f = io::split_fields(lines[l]);
        if (f.size() != header.size()) throw IngestionError("results CSV row " + std::to_string(l) + " has wrong width");
        ResultRow r;
        r.algorithm = parse_algorithm(f[0]);
        r.sweep_value = detail::parse_cell(f[1]);
        r.count = static_cast<std::size_t>(detail::parse_cell(f[2]));
        r.missing = static_cast<std::size_t>(detail::parse_cell(f[3]));
        IndexStat* stats[] = {&r.diag, &r.kappa, &r.rand, &r.crand};
        for (std::size_t s = 0; s < 4; ++s) {
            stats[s]->mean = detail::parse_cell(f[4 + 2 * s]);
            stats[s]->se = detail::parse_cell(f[5 + 2 * s]);
        }
        r.mean_runtime_ms = detail::parse_cell(f[12]);
        t.rows.push_back(r);
    }
    return t;
}

/// Per-replicate scores, including failed fits with their error text.
inline std::string raw_scores_csv(const std::vector<ReplicateScore>& raw, SweepParameter sweep) {
    std::string out = "algorithm," + std::string(to_string(sweep)) +
                      ",replicate,data_seed,fit_seed,checksum,alpha,status,diag,kappa,rand,crand,within,runtime_ms,"
                      "error\n";
    for (const auto& s : raw) {
        char checksum[17];
        std::snprintf(checksum, sizeof checksum, "%016llx", static_cast<unsigned long long>(s.checksum));
        std::string err = s.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out += std::string(to_string(s.algorithm)) + "," + io::format_double(s.sweep_value) + "," +
               std::to_string(s.replicate) + "," + std::to_string(s.data_seed) + "," + std::to_string(s.fit_seed) +
               "," + checksum + "," + io::format_double(s.alpha) + "," + (s.ok ? "ok" : "failed");
        if (s.ok) {
            out += "," + io::format_double(s.index.diag) + "," + io::format_double(s.index.kappa) + "," +
                   io::format_double(s.index.rand) + "," + io::format_double(s.index.crand) + "," +
                   io::format_double(s.within) + "," + io::format_double(s.runtime_ms) + ",";
        } else {
            out += ",NA,NA,NA,NA,NA,NA," + err;
        }
        out += "\n";
    }
    return out;
}

inline nlohmann::json spec_json(const ExperimentSpec& s) {
    nlohmann::json j;
    if (s.dataset_path) {
        j["dataset"] = *s.dataset_path;
    } else {
        j["design"] = {{"family", std::string(to_string(s.design.family))},
                       {"n", s.design.n},
                       {"dim", s.design.dim},
                       {"separation", s.design.separation}};
    }
    j["sweep"] = std::string(to_string(s.sweep));
    j["sweep_values"] = s.sweep_values;
    std::vector<std::string> algs;
    for (Algorithm a : s.algorithms) algs.emplace_back(to_string(a));
    j["algorithms"] = algs;
    j["replicates"] = s.replicates;
    j["base_seed"] = s.base_seed;
    j["alpha_policy"] = s.alpha_policy.fixed ? nlohmann::json(*s.alpha_policy.fixed) : nlohmann::json("auto");
    j["k"] = s.k;
    j["restarts"] = s.restarts;
    j["max_passes"] = s.max_passes;
    j["pairing"] = std::string(to_string(s.pairing));
    j["timing"] = s.record_timing;
    return j;
}

/// Inverse of spec_json; omitted keys keep their defaults, unknown keys are
/// rejected so typos do not silently fall back.
inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("experiment spec must be a JSON object");
    static const std::set<std::string> known = {"dataset",  "design", "sweep",    "sweep_values", "algorithms",
                                                "replicates", "base_seed", "alpha_policy", "k", "restarts",
                                                "max_passes", "pairing",  "timing",   "threads"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw InputError("unknown experiment spec key '" + key + "'");
    }
    ExperimentSpec s;
    try {
        if (j.contains("dataset")) s.dataset_path = j.at("dataset").get<std::string>();
        if (j.contains("design")) {
            const auto& d = j.at("design");
            if (d.contains("family")) s.design.family = parse_family(d.at("family").get<std::string>());
            if (d.contains("n")) s.design.n = d.at("n").get<std::size_t>();
            if (d.contains("dim")) s.design.dim = d.at("dim").get<std::size_t>();
            if (d.contains("separation")) s.design.separation = d.at("separation").get<double>();
        }
        if (j.contains("sweep")) s.sweep = parse_sweep(j.at("sweep").get<std::string>());
        if (j.contains("sweep_values")) s.sweep_values = j.at("sweep_values").get<std::vector<double>>();
        if (j.contains("algorithms")) {
            s.algorithms.clear();
            for (const auto& a : j.at("algorithms")) s.algorithms.push_back(parse_algorithm(a.get<std::string>()));
        }
        if (j.contains("replicates")) s.replicates = j.at("replicates").get<std::size_t>();
        if (j.contains("base_seed")) s.base_seed = j.at("base_seed").get<std::uint64_t>();
        if (j.contains("alpha_policy")) {
            const auto& a = j.at("alpha_policy");
            if (a.is_number()) {
                s.alpha_policy.fixed = a.get<double>();
            } else if (!(a.is_string() && a.get<std::string>() == "auto")) {
                throw InputError("alpha_policy must be a number or \"auto\"");
            }
        }
        if (j.contains("k")) s.k = j.at("k").get<std::size_t>();
        if (j.contains("restarts")) s.restarts = j.at("restarts").get<std::size_t>();
        if (j.contains("max_passes")) s.max_passes = j.at("max_passes").get<std::size_t>();
        if (j.contains("pairing")) s.pairing = parse_pairing(j.at("pairing").get<std::string>());
        if (j.contains("timing")) s.record_timing = j.at("timing").get<bool>();
        if (j.contains("threads")) s.threads = j.at("threads").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("experiment spec: ") + e.what());
    }
    s.validate();
    return s;
}

inline std::string results_json(const ExperimentResult& r) {
    nlohmann::json j;
    j["schema"] = results_schema;
    j["experiment"] = spec_json(r.spec);
    nlohmann::json rows = nlohmann::json::array();
    std::size_t missing = 0;
    for (const auto& row : r.table.rows) {
        missing += row.missing;
        rows.push_back({{"algorithm", std::string(to_string(row.algorithm))},
                        {"sweep_value", detail::number_or_null(row.sweep_value)},
                        {"count", row.count},
                        {"missing", row.missing},
                        {"diag", detail::stat_json(row.diag)},
                        {"kappa", detail::stat_json(row.kappa)},
                        {"rand", detail::stat_json(row.rand)},
                        {"crand", detail::stat_json(row.crand)},
                        {"mean_runtime_ms", row.mean_runtime_ms}});
    }
    j["rows"] = rows;
    j["missing_cells"] = missing;
    return j.dump(2) + "\n";
}

/// Line chart of mean cRand against the sweep value, one polyline per
/// algorithm. Undefined points are skipped.
inline std::string crand_svg(const ResultTable& t) {
    constexpr double width = 640, height = 420, left = 60, right = 150, top = 30, bottom = 50;
    std::vector<double> xs;
    for (const auto& r : t.rows) {
        if (!std::isnan(r.sweep_value)) xs.push_back(r.sweep_value);
    }
    double xmin = 0.0, xmax = 1.0;
    if (!xs.empty()) {
        xmin = *std::min_element(xs.begin(), xs.end());
        xmax = *std::max_element(xs.begin(), xs.end());
    }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    double ymin = 0.0;
    for (const auto& r : t.rows) {
        if (!std::isnan(r.crand.mean)) ymin = std::min(ymin, r.crand.mean);
    }
    const double ymax = 1.0;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
    auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (height - top - bottom); };
    auto num = [](double v) {
        char b[32];
        std::snprintf(b, sizeof b, "%.2f", v);
        return std::string(b);
    };

    static const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                      num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(height - bottom) + "\" x2=\"" + num(width - right) +
           "\" y2=\"" + num(height - bottom) + "\"/>\n";
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" +
           num(height - bottom) + "\"/>\n</g>\n";
    svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double y = ymin + (ymax - ymin) * tick / 4.0;
        svg += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" + num(y) +
               "</text>\n";
        const double x = xmin + (xmax - xmin) * tick / 4.0;
        svg += "<text x=\"" + num(px(x)) + "\" y=\"" + num(height - bottom + 16) + "\" text-anchor=\"middle\">" +
               num(x) + "</text>\n";
    }
    svg += "<text x=\"" + num((left + width - right) / 2) + "\" y=\"" + num(height - 10) +
           "\" text-anchor=\"middle\">" + std::string(to_string(t.sweep)) + "</text>\n";
    svg += "<text x=\"14\" y=\"" + num((top + height - bottom) / 2) + "\" transform=\"rotate(-90 14 " +
           num((top + height - bottom) / 2) + ")\" text-anchor=\"middle\">mean cRand</text>\n</g>\n";

    std::vector<Algorithm> order;
    for (const auto& r : t.rows) {
        if (std::find(order.begin(), order.end(), r.algorithm) == order.end()) order.push_back(r.algorithm);
    }
    for (std::size_t s = 0; s < order.size(); ++s) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : t.rows) {
            if (r.algorithm == order[s] && !std::isnan(r.sweep_value) && !std::isnan(r.crand.mean)) {
                pts.emplace_back(r.sweep_value, r.crand.mean);
            }
        }
        std::sort(pts.begin(), pts.end());
        const char* colour = palette[s % std::size(palette)];
        std::string points;
        for (const auto& [x, y] : pts) points += (points.empty() ? "" : " ") + num(px(x)) + "," + num(py(y));
        svg += "<polyline data-algorithm=\"" + std::string(to_string(order[s])) + "\" fill=\"none\" stroke=\"" +
               colour + "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
        const double ly = top + 18.0 * static_cast<double>(s);
        svg += "<text x=\"" + num(width - right + 10) + "\" y=\"" + num(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + colour + "\">" +
               std::string(to_string(order[s])) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

/// Writes the requested formats into `out_dir` (created if needed) and
/// returns the paths written. Raw per-replicate scores are always written
/// alongside CSV or JSON output.
inline std::vector<std::string> emit_outputs(const ExperimentResult& r, const std::string& out_dir,
                                             const std::set<OutputFormat>& formats) {
    if (r.spec.algorithms.empty()) throw InputError("no algorithms in experiment");
    if (r.table.rows.empty()) throw InputError("result table is empty");
    if (formats.empty()) throw InputError("no output format selected");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

    std::vector<std::string> written;
    auto put = [&](const std::string& name, const std::string& content) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        io::write_file(path, content);
        written.push_back(path);
    };
    if (formats.count(OutputFormat::csv)) put("results.csv", results_csv(r.table));
    if (formats.count(OutputFormat::json)) put("results.json", results_json(r));
    if (formats.count(OutputFormat::csv) || formats.count(OutputFormat::json)) {
        put("raw_scores.csv", raw_scores_csv(r.raw, r.table.sweep));
    }
    if (formats.count(OutputFormat::svg)) put("crand.svg", crand_svg(r.table));
    return written;
}

/// Index report as a JSON object.
inline nlohmann::json index_json(const IndexReport& r) {
    return {{"diag", r.diag}, {"kappa", r.kappa}, {"rand", r.rand}, {"crand", r.crand}};
}

inline std::string index_csv_header() { return "diag,kappa,rand,crand\n"; }

inline std::string index_csv_row(const IndexReport& r) {
    return io::format_double(r.diag) + "," + io::format_double(r.kappa) + "," + io::format_double(r.rand) + "," +
           io::format_double(r.crand) + "\n";
}

}  // namespace kgroups
