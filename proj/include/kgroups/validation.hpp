#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "partition.hpp"

namespace kgroups {

/// Cross-tabulation of two labelings of the same n points.
class ContingencyTable {
public:
    ContingencyTable(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), cells_(rows * cols, 0), row_sums_(rows, 0), col_sums_(cols, 0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t operator()(std::size_t r, std::size_t c) const noexcept { return cells_[r * cols_ + c]; }
    std::size_t row_sum(std::size_t r) const noexcept { return row_sums_[r]; }
    std::size_t col_sum(std::size_t c) const noexcept { return col_sums_[c]; }

    void add(std::size_t r, std::size_t c, std::size_t count = 1) {
        cells_[r * cols_ + c] += count;
        row_sums_[r] += count;
        col_sums_[c] += count;
        n_ += count;
    }

    friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::size_t> cells_;
    std::vector<std::size_t> row_sums_;
    std::vector<std::size_t> col_sums_;
    std::size_t n_ = 0;
};

/// Table of label pairs; labels are 0-based and the table is sized by the
/// largest label seen on each side.
inline ContingencyTable contingency(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) {
        throw InputError("labelings have different lengths: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
    const std::size_t rows = a.empty() ? 0 : *std::max_element(a.begin(), a.end()) + 1;
    const std::size_t cols = b.empty() ? 0 : *std::max_element(b.begin(), b.end()) + 1;
    ContingencyTable t(rows, cols);
    for (std::size_t i = 0; i < a.size(); ++i) t.add(a[i], b[i]);
    return t;
}

inline ContingencyTable contingency(const Partition& p1, const Partition& p2) {
    if (p1.n() != p2.n()) {
        throw InputError("partitions cover different numbers of points: " + std::to_string(p1.n()) + " vs " +
                         std::to_string(p2.n()));
    }
    ContingencyTable t(p1.k(), p2.k());
    for (std::size_t i = 0; i < p1.n(); ++i) t.add(p1.label(i), p2.label(i));
    return t;
}

namespace detail {

inline double choose2(std::size_t x) noexcept {
    return static_cast<double>(x) * (static_cast<double>(x) - 1.0) / 2.0;
}

struct PairCounts {
    double same_both = 0.0;   // sum over cells of C(n_ij, 2)
    double same_rows = 0.0;   // sum over rows of C(n_i., 2)
    double same_cols = 0.0;   // sum over columns of C(n_.j, 2)
    double total = 0.0;       // C(n, 2)
};

inline PairCounts pair_counts(const ContingencyTable& t) {
    if (t.n() < 2) throw InputError("pair-counting indices need at least two points");
    PairCounts pc;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        pc.same_rows += choose2(t.row_sum(r));
        for (std::size_t c = 0; c < t.cols(); ++c) pc.same_both += choose2(t(r, c));
    }
    for (std::size_t c = 0; c < t.cols(); ++c) pc.same_cols += choose2(t.col_sum(c));
    pc.total = choose2(t.n());
    return pc;
}

/// True when both labelings induce the same set partition: every nonempty
/// row and every nonempty column holds exactly one nonzero cell.
inline bool same_set_partition(const ContingencyTable& t) {
    for (std::size_t r = 0; r < t.rows(); ++r) {
        std::size_t nz = 0;
        for (std::size_t c = 0; c < t.cols(); ++c) nz += t(r, c) > 0;
        if (nz > 1) return false;
    }
    for (std::size_t c = 0; c < t.cols(); ++c) {
        std::size_t nz = 0;
        for (std::size_t r = 0; r < t.rows(); ++r) nz += t(r, c) > 0;
        if (nz > 1) return false;
    }
    return true;
}

}  // namespace detail

/// Fraction of the C(n,2) point pairs on which the two labelings agree
/// (together in both, or apart in both).
inline double rand_index(const ContingencyTable& t) {
    const auto pc = detail::pair_counts(t);
    const double agree = pc.total + 2.0 * pc.same_both - pc.same_rows - pc.same_cols;
    return agree / pc.total;
}

/// Hubert-Arabie adjusted Rand index. When the chance-expected index equals
/// its maximum the ratio is undefined; that case reports 1 for identical
/// set partitions and 0 otherwise.
inline double adjusted_rand(const ContingencyTable& t) {
    const auto pc = detail::pair_counts(t);
    // Both sides scaled by C(n,2) so that the pair counts stay integral and
    // only the final division rounds.
    const double product = pc.same_rows * pc.same_cols;
    const double denom = 0.5 * (pc.same_rows + pc.same_cols) * pc.total - product;
    if (denom == 0.0) return detail::same_set_partition(t) ? 1.0 : 0.0;
    return (pc.same_both * pc.total - product) / denom;
}

/// Maximum-weight perfect matching on a square weight matrix (row-major),
/// solved as a minimum-cost assignment with the Hungarian method
/// (potentials plus shortest augmenting paths, O(n^3)). Returns the column
/// assigned to each row.
inline std::vector<std::size_t> max_weight_assignment(std::span<const double> weight, std::size_t n) {
    if (weight.size() != n * n) throw InputError("assignment matrix is not square");
    if (n == 0) return {};
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based arrays; index 0 is the virtual source column.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), way_cost(n + 1);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    auto cost = [&](std::size_t i, std::size_t j) { return -weight[(i - 1) * n + (j - 1)]; };
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::fill(way_cost.begin(), way_cost.end(), inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0, j) - u[i0] - v[j];
                if (cur < way_cost[j]) {
                    way_cost[j] = cur;
                    way[j] = j0;
                }
                if (way_cost[j] < delta) {
                    delta = way_cost[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    way_cost[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

/// Column matched to each row of the table (padded square) under the
/// label correspondence that puts the most points on the diagonal.
/// Several correspondences can tie on the diagonal while differing in their
/// chance agreement, so ties go to the smallest sum of row total times
/// column total. Scaling the cell count by n^2 + 1 makes one extra diagonal
/// point outweigh any difference in that product, which keeps the result
/// independent of how either labeling numbers its clusters.
inline std::vector<std::size_t> optimal_label_matching(const ContingencyTable& t) {
    const std::size_t m = std::max(t.rows(), t.cols());
    const double n = static_cast<double>(t.n());
    const double scale = n * n + 1.0;
    std::vector<double> w(m * m, 0.0);
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.cols(); ++c) {
            w[r * m + c] = static_cast<double>(t(r, c)) * scale -
                           static_cast<double>(t.row_sum(r)) * static_cast<double>(t.col_sum(c));
        }
    }
    return max_weight_assignment(w, m);
}

namespace detail {

struct MatchedAgreement {
    double observed = 0.0;
    double chance = 0.0;
};

inline MatchedAgreement matched_agreement(const ContingencyTable& t) {
    if (t.n() == 0) throw InputError("contingency table is empty");
    const auto match = optimal_label_matching(t);
    const double n = static_cast<double>(t.n());
    MatchedAgreement out;
    for (std::size_t r = 0; r < match.size(); ++r) {
        const std::size_t c = match[r];
        if (r >= t.rows() || c >= t.cols()) continue;
        out.observed += static_cast<double>(t(r, c));
        out.chance += static_cast<double>(t.row_sum(r)) * static_cast<double>(t.col_sum(c));
    }
    out.observed /= n;
    out.chance /= n * n;
    return out;
}

}  // namespace detail

/// Share of points on the diagonal after optimally matching found labels
/// to true labels.
inline double diag_index(const ContingencyTable& t) { return detail::matched_agreement(t).observed; }

/// Cohen's kappa on the optimally matched table.
inline double kappa_index(const ContingencyTable& t) {
    const auto a = detail::matched_agreement(t);
    if (a.chance == 1.0) return a.observed == 1.0 ? 1.0 : 0.0;
    return (a.observed - a.chance) / (1.0 - a.chance);
}

struct IndexReport {
    double diag = 0.0;
    double kappa = 0.0;
    double rand = 0.0;
    double crand = 0.0;
};

inline IndexReport score(const ContingencyTable& t) {
    return {diag_index(t), kappa_index(t), rand_index(t), adjusted_rand(t)};
}

inline IndexReport score(std::span<const std::size_t> truth, std::span<const std::size_t> found) {
    return score(contingency(truth, found));
}

}  // namespace kgroups
