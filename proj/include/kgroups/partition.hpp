#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace kgroups {

/// Hard assignment of n observations to K nonempty clusters, with the
/// cluster sizes kept alongside the labels.
class Partition {
public:
    Partition() = default;

    /// Validates that every label is below `k` and every cluster is
    /// nonempty.
    Partition(std::vector<std::size_t> labels, std::size_t k) : labels_(std::move(labels)), sizes_(k, 0) {
        if (k == 0) throw InputError("partition needs at least one cluster");
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] >= k) {
                throw InputError("label " + std::to_string(labels_[i]) + " at index " + std::to_string(i) +
                                 " is out of range for K=" + std::to_string(k));
            }
            ++sizes_[labels_[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes_[c] == 0) throw InputError("cluster " + std::to_string(c) + " is empty");
        }
    }

    /// Maps arbitrary integer labels onto 0..K'-1 in increasing order of
    /// the original values.
    static Partition from_raw_labels(std::span<const long long> raw) {
        std::vector<long long> distinct(raw.begin(), raw.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        std::vector<std::size_t> labels(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            labels[i] = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), raw[i]) -
                                                 distinct.begin());
        }
        return Partition(std::move(labels), distinct.size());
    }

    std::size_t n() const noexcept { return labels_.size(); }
    std::size_t k() const noexcept { return sizes_.size(); }
    std::size_t label(std::size_t i) const noexcept { return labels_[i]; }
    std::size_t size(std::size_t c) const noexcept { return sizes_[c]; }
    std::span<const std::size_t> labels() const noexcept { return labels_; }
    std::span<const std::size_t> sizes() const noexcept { return sizes_; }

    /// Indices of the members of cluster `c`, ascending.
    std::vector<std::size_t> members(std::size_t c) const {
        std::vector<std::size_t> out;
        out.reserve(sizes_[c]);
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] == c) out.push_back(i);
        }
        return out;
    }

    /// Relabels point `i`. Rejects moves that would empty the source.
    void move(std::size_t i, std::size_t to) {
        if (i >= labels_.size()) throw InputError("point index out of range");
        if (to >= sizes_.size()) throw InputError("target cluster out of range");
        const std::size_t from = labels_[i];
        if (from == to) throw RejectedMove("point is already in the target cluster");
        if (sizes_[from] < 2) throw RejectedMove("move would empty cluster " + std::to_string(from));
        --sizes_[from];
        ++sizes_[to];
        labels_[i] = to;
    }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<std::size_t> labels_;
    std::vector<std::size_t> sizes_;
};

/// Uniformly random labels conditioned on every cluster being nonempty.
///
/// Sampled exactly and sequentially: with r points left to label and m
/// clusters still uncovered, each uncovered cluster is chosen with weight
/// g(r-1, m-1) and each covered cluster with weight g(r-1, m), where g(r, m)
/// is the fraction of the K^r labelings of r points that cover m given
/// clusters. g satisfies g(r, m) = (m g(r-1, m-1) + (K-m) g(r-1, m)) / K.
inline Partition random_partition(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw InputError("K must be at least 1");
    if (k > n) {
        throw InputError("K=" + std::to_string(k) + " exceeds the number of observations n=" + std::to_string(n));
    }
    const double kd = static_cast<double>(k);
    // cover[r * (k + 1) + m] = g(r, m)
    std::vector<double> cover((n + 1) * (k + 1), 0.0);
    cover[0] = 1.0;
    for (std::size_t r = 1; r <= n; ++r) {
        for (std::size_t m = 0; m <= k; ++m) {
            double v = static_cast<double>(k - m) * cover[(r - 1) * (k + 1) + m];
            if (m > 0) v += static_cast<double>(m) * cover[(r - 1) * (k + 1) + m - 1];
            cover[r * (k + 1) + m] = v / kd;
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> labels(n);
    std::vector<char> covered(k, 0);
    std::size_t uncovered = k;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t rest = n - i - 1;
        const double w_new = uncovered > 0 ? cover[rest * (k + 1) + uncovered - 1] : 0.0;
        const double w_old = cover[rest * (k + 1) + uncovered];
        const double total = static_cast<double>(uncovered) * w_new + static_cast<double>(k - uncovered) * w_old;
        double u = rng.uniform() * total;
        std::size_t chosen = k - 1;
        for (std::size_t c = 0; c < k; ++c) {
            const double w = covered[c] ? w_old : w_new;
            if (w <= 0.0) continue;
            chosen = c;
            if (u < w) break;
            u -= w;
        }
        labels[i] = chosen;
        if (!covered[chosen]) {
            covered[chosen] = 1;
            --uncovered;
        }
    }
    return Partition(std::move(labels), k);
}

}  // namespace kgroups
