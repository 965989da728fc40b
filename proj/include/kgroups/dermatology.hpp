#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "data_matrix.hpp"
#include "datagen.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "summation.hpp"
#include "validation.hpp"

namespace kgroups {

/// UCI dermatology layout: 34 attributes (age last, `?` when unknown)
/// followed by the class 1..6.
inline constexpr std::size_t dermatology_attributes = 34;
inline constexpr std::size_t dermatology_classes = 6;

/// FNV-1a 64 of a byte string as 16 hex digits.
inline std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Centres every column to mean 0 and scales it to sample standard
/// deviation 1 (n - 1 denominator). A constant column cannot be scaled.
inline DataMatrix standardize_columns(const DataMatrix& m) {
    const std::size_t n = m.rows();
    const std::size_t p = m.cols();
    if (n < 2) throw IngestionError("standardization needs at least two rows");
    std::vector<double> out(m.values().begin(), m.values().end());
    for (std::size_t c = 0; c < p; ++c) {
        CompensatedSum s;
        for (std::size_t i = 0; i < n; ++i) s += m(i, c);
        const double mean = s.value() / static_cast<double>(n);
        CompensatedSum sq;
        for (std::size_t i = 0; i < n; ++i) sq += (m(i, c) - mean) * (m(i, c) - mean);
        const double sd = std::sqrt(sq.value() / static_cast<double>(n - 1));
        if (!(sd > 0.0)) throw IngestionError("column " + std::to_string(c + 1) + " is constant");
        for (std::size_t i = 0; i < n; ++i) out[i * p + c] = (m(i, c) - mean) / sd;
    }
    return DataMatrix(n, p, std::move(out));
}

struct DermatologyData {
    LabeledSample sample;  ///< standardized attributes, truth = class - 1
    std::size_t records = 0;
    std::size_t dropped = 0;
    std::string hash;
};

/// Parses the raw file text. Records with a missing value are dropped, the
/// remaining attributes standardized.
inline DermatologyData parse_dermatology(std::string_view text, std::optional<std::string> expected_hash = {}) {
    DermatologyData out;
    out.hash = content_hash(text);
    if (expected_hash && *expected_hash != out.hash) {
        throw IngestionError("dermatology file hash " + out.hash + " does not match expected " + *expected_hash);
    }
    const auto lines = io::lines_of(text);
    if (lines.empty()) throw IngestionError("dermatology file is empty");

    std::vector<double> values;
    std::vector<std::size_t> truth;
    for (std::size_t l = 0; l < lines.size(); ++l) {
        const std::string where = "record " + std::to_string(l + 1);
        const auto fields = io::split_fields(lines[l]);
        if (fields.size() != dermatology_attributes + 1) {
            throw IngestionError(where + ": expected " + std::to_string(dermatology_attributes + 1) +
                                 " columns, found " + std::to_string(fields.size()));
        }
        ++out.records;
        std::vector<double> row(dermatology_attributes);
        bool missing = false;
        for (std::size_t c = 0; c < dermatology_attributes; ++c) {
            if (io::is_missing(fields[c])) {
                missing = true;
                continue;
            }
            const auto v = io::parse_double(fields[c]);
            if (!v || !std::isfinite(*v)) {
                throw IngestionError(where + ", column " + std::to_string(c + 1) + ": bad value '" + fields[c] + "'");
            }
            row[c] = *v;
        }
        const auto cls = io::parse_integer(fields[dermatology_attributes]);
        if (!cls || *cls < 1 || *cls > static_cast<long long>(dermatology_classes)) {
            throw IngestionError(where + ", column " + std::to_string(dermatology_attributes + 1) + ": bad class '" +
                                 fields[dermatology_attributes] + "'");
        }
        if (missing) {
            ++out.dropped;
            continue;
        }
        values.insert(values.end(), row.begin(), row.end());
        truth.push_back(static_cast<std::size_t>(*cls - 1));
    }
    const std::size_t kept = truth.size();
    if (kept < 2) throw IngestionError("dermatology file has fewer than two complete records");
    out.sample.data = standardize_columns(DataMatrix(kept, dermatology_attributes, std::move(values)));
    out.sample.truth = std::move(truth);
    out.sample.components = dermatology_classes;
    return out;
}

inline DermatologyData load_dermatology(const std::string& path, std::optional<std::string> expected_hash = {}) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const InputError& e) {
        throw IngestionError(e.what());
    }
    return parse_dermatology(text, std::move(expected_hash));
}

struct AlgorithmReport {
    Algorithm algorithm;
    IndexReport index;
    double within = 0.0;
};

/// Six-cluster fits of the standardized attributes, scored against the
/// disease classes. k-groups uses alpha = 1.
inline std::vector<AlgorithmReport> run_dermatology(const DermatologyData& d, const std::vector<Algorithm>& algorithms,
                                                    std::size_t restarts, std::uint64_t seed,
                                                    Pairing pairing = Pairing::sequential_nearest,
                                                    std::size_t threads = 1) {
    if (algorithms.empty()) throw InputError("no algorithms selected");
    const DistanceCache cache(d.sample.data, Alpha(1.0), threads);
    std::vector<AlgorithmReport> out;
    for (Algorithm a : algorithms) {
        FitRequest req;
        req.k = dermatology_classes;
        req.alpha = 1.0;
        req.restarts = restarts;
        req.seed = seed;
        req.pairing = pairing;
        const FitResult r = run_algorithm(a, d.sample.data, req, &cache);
        out.push_back({a, score(d.sample.truth, r.partition.labels()), r.within});
    }
    return out;
}

}  // namespace kgroups
