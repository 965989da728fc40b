#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "data_matrix.hpp"
#include "error.hpp"

namespace kgroups::io {

/// Shortest decimal text that parses back to exactly `x`; NaN as "NA".
inline std::string format_double(double x) {
    if (std::isnan(x)) return "NA";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split_fields(std::string_view line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool is_missing(std::string_view token) { return token.empty() || token == "?" || token == "NA"; }

inline std::optional<double> parse_double(std::string_view token) {
    token = trim(token);
    if (token.empty()) return std::nullopt;
    if (token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_integer(std::string_view token) {
    token = trim(token);
    if (token.empty()) return std::nullopt;
    if (token.front() == '+') token.remove_prefix(1);
    long long v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec == std::errc{} && res.ptr == token.data() + token.size()) return v;
    // Accept integral floats such as "2.0".
    if (auto d = parse_double(token); d && std::floor(*d) == *d && std::abs(*d) < 9e15) {
        return static_cast<long long>(*d);
    }
    return std::nullopt;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write to '" + path + "' failed");
}

/// Non-blank lines of a text blob, CR stripped.
inline std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        std::string_view line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!trim(line).empty()) out.emplace_back(line);
        start = pos + 1;
    }
    return out;
}

struct CsvOptions {
    enum class Label { automatic, none, last };
    /// automatic: the final column is a label column when the header names
    /// it `label`.
    Label label = Label::automatic;
    /// Drop rows with a missing cell instead of failing.
    bool drop_missing = false;
};

struct CsvDataset {
    DataMatrix data;
    std::vector<std::string> header;
    std::optional<std::vector<long long>> labels;
    std::size_t source_rows = 0;
    /// Source row index (0-based, header excluded) of every kept row.
    std::vector<std::size_t> kept_rows;
};

/// Numeric CSV with an optional header row (detected by any non-numeric,
/// non-missing token in the first line). Missing cells are `?`, `NA` or
/// empty.
inline CsvDataset parse_numeric_csv(std::string_view text, const CsvOptions& opt = {}) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw IngestionError("CSV input is empty");

    CsvDataset out;
    std::size_t first = 0;
    {
        const auto fields = split_fields(lines[0]);
        const bool header = std::any_of(fields.begin(), fields.end(),
                                        [](const std::string& f) { return !is_missing(f) && !parse_double(f); });
        if (header) {
            out.header = fields;
            first = 1;
        }
    }
    if (first >= lines.size()) throw IngestionError("CSV input has a header but no data rows");

    const std::size_t width = split_fields(lines[first]).size();
    if (!out.header.empty() && out.header.size() != width) {
        throw IngestionError("header has " + std::to_string(out.header.size()) + " columns but row 1 has " +
                             std::to_string(width));
    }
    bool has_label = opt.label == CsvOptions::Label::last;
    if (opt.label == CsvOptions::Label::automatic && !out.header.empty()) {
        std::string last = out.header.back();
        std::transform(last.begin(), last.end(), last.begin(), [](unsigned char c) { return std::tolower(c); });
        has_label = last == "label";
    }
    const std::size_t features = has_label ? width - 1 : width;
    if (features == 0) throw IngestionError("CSV input has no feature columns");

    std::vector<double> values;
    std::vector<long long> labels;
    for (std::size_t l = first; l < lines.size(); ++l) {
        const std::size_t row = l - first;
        const auto fields = split_fields(lines[l]);
        if (fields.size() != width) {
            throw IngestionError("row " + std::to_string(row + 1) + " has " + std::to_string(fields.size()) +
                                 " columns, expected " + std::to_string(width));
        }
        ++out.source_rows;
        std::vector<double> parsed(features);
        bool missing = false;
        for (std::size_t c = 0; c < width; ++c) {
            if (is_missing(fields[c])) {
                if (!opt.drop_missing) {
                    throw IngestionError("missing value at row " + std::to_string(row + 1) + ", column " +
                                         std::to_string(c + 1));
                }
                missing = true;
                continue;
            }
            if (c < features) {
                const auto v = parse_double(fields[c]);
                if (!v || !std::isfinite(*v)) {
                    throw IngestionError("bad number '" + fields[c] + "' at row " + std::to_string(row + 1) +
                                         ", column " + std::to_string(c + 1));
                }
                parsed[c] = *v;
            }
        }
        if (missing) continue;
        if (has_label) {
            const auto lab = parse_integer(fields[features]);
            if (!lab) {
                throw IngestionError("bad label '" + fields[features] + "' at row " + std::to_string(row + 1));
            }
            labels.push_back(*lab);
        }
        values.insert(values.end(), parsed.begin(), parsed.end());
        out.kept_rows.push_back(row);
    }
    if (out.kept_rows.empty()) throw IngestionError("no complete rows in CSV input");
    out.data = DataMatrix(out.kept_rows.size(), features, std::move(values));
    if (has_label) out.labels = std::move(labels);
    return out;
}

inline CsvDataset load_numeric_csv(const std::string& path, const CsvOptions& opt = {}) {
    return parse_numeric_csv(read_file(path), opt);
}

/// Integer labels from a one-column CSV (or the `label` column of a wider
/// one), optional header.
inline std::vector<long long> parse_label_csv(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw IngestionError("label file is empty");
    std::size_t first = 0;
    std::size_t column = 0;
    {
        const auto fields = split_fields(lines[0]);
        if (!parse_integer(fields.back())) {
            first = 1;
            column = fields.size() - 1;
            for (std::size_t c = 0; c < fields.size(); ++c) {
                if (fields[c] == "label") column = c;
            }
        } else {
            column = fields.size() - 1;
        }
    }
    std::vector<long long> out;
    for (std::size_t l = first; l < lines.size(); ++l) {
        const auto fields = split_fields(lines[l]);
        if (column >= fields.size()) throw IngestionError("row " + std::to_string(l - first + 1) + " is too short");
        const auto v = parse_integer(fields[column]);
        if (!v) {
            throw IngestionError("bad label '" + fields[column] + "' at row " + std::to_string(l - first + 1));
        }
        out.push_back(*v);
    }
    return out;
}

inline std::vector<long long> load_label_csv(const std::string& path) { return parse_label_csv(read_file(path)); }

/// One `label` column; rows absent from `kept_rows` get an empty cell.
inline std::string format_label_csv(std::span<const std::size_t> labels, std::size_t source_rows,
                                    std::span<const std::size_t> kept_rows) {
    std::vector<std::string> cells(source_rows);
    for (std::size_t i = 0; i < kept_rows.size(); ++i) cells[kept_rows[i]] = std::to_string(labels[i]);
    std::string out = "label\n";
    for (const auto& c : cells) out += c + "\n";
    return out;
}

}  // namespace kgroups::io
