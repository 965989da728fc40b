#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace kgroups {

/// n observations by p features, row-major, all values finite.
class DataMatrix {
public:
    DataMatrix() = default;

    DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (rows_ == 0 || cols_ == 0) throw InputError("data matrix must have at least one row and one column");
        if (values_.size() != rows_ * cols_) {
            throw InputError("data matrix has " + std::to_string(values_.size()) + " values, expected " +
                             std::to_string(rows_ * cols_));
        }
        for (std::size_t k = 0; k < values_.size(); ++k) {
            if (!std::isfinite(values_[k])) {
                throw InputError("non-finite value at row " + std::to_string(k / cols_) + ", column " +
                                 std::to_string(k % cols_));
            }
        }
    }

    /// Builds a one-feature matrix from a sequence of scalars.
    static DataMatrix column(std::span<const double> xs) {
        return DataMatrix(xs.size(), 1, std::vector<double>(xs.begin(), xs.end()));
    }

    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw InputError("data matrix must have at least one row");
        const std::size_t p = rows.front().size();
        std::vector<double> values;
        values.reserve(rows.size() * p);
        for (const auto& r : rows) {
            if (r.size() != p) throw InputError("ragged rows in data matrix");
            values.insert(values.end(), r.begin(), r.end());
        }
        return DataMatrix(rows.size(), p, std::move(values));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * cols_, cols_};
    }

    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }

    std::span<const double> values() const noexcept { return values_; }

    /// FNV-1a over the raw bytes of shape and values. Two matrices with the
    /// same checksum were, for all practical purposes, the same draw.
    std::uint64_t checksum() const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto feed = [&h](const void* p, std::size_t len) {
            const auto* b = static_cast<const unsigned char*>(p);
            for (std::size_t k = 0; k < len; ++k) {
                h ^= b[k];
                h *= 0x100000001b3ULL;
            }
        };
        const std::uint64_t shape[2] = {rows_, cols_};
        feed(shape, sizeof shape);
        feed(values_.data(), values_.size() * sizeof(double));
        return h;
    }

    friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

}  // namespace kgroups
