#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "data_matrix.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "partition.hpp"
#include "summation.hpp"

namespace kgroups {

/// Exponent on Euclidean distance, 0 < alpha <= 2. alpha = 2 is admitted
/// so that k-means is reachable as a special case.
class Alpha {
public:
    constexpr Alpha() = default;
    explicit Alpha(double value) : value_(value) {
        if (!(value > 0.0 && value <= 2.0)) {
            throw InputError("alpha must satisfy 0 < alpha <= 2, got " + std::to_string(value));
        }
    }
    constexpr double value() const noexcept { return value_; }
    friend constexpr bool operator==(Alpha, Alpha) = default;

private:
    double value_ = 1.0;
};

namespace detail {

/// d^alpha for a Euclidean distance given as its square. The integer
/// exponents are taken exactly; fractional ones go through exp(alpha ln d)
/// with d = 0 mapped to 0.
inline double power_of_distance(double squared, double alpha) noexcept {
    if (squared <= 0.0) return 0.0;
    if (alpha == 2.0) return squared;
    const double d = std::sqrt(squared);
    if (alpha == 1.0) return d;
    return std::exp(alpha * std::log(d));
}

inline double squared_distance(std::span<const double> x, std::span<const double> y) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double t = x[k] - y[k];
        s += t * t;
    }
    return s;
}

}  // namespace detail

/// |x - y|^alpha with |.| the Euclidean norm.
inline double alpha_distance(std::span<const double> x, std::span<const double> y, Alpha alpha) {
    if (x.size() != y.size()) {
        throw InputError("dimension mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    }
    return detail::power_of_distance(detail::squared_distance(x, y), alpha.value());
}

/// Dense symmetric matrix of |x_i - x_j|^alpha over all observation pairs.
/// Immutable after construction.
class DistanceCache {
public:
    DistanceCache(const DataMatrix& data, Alpha alpha, std::size_t threads = 1)
        : n_(data.rows()), alpha_(alpha), dist_(n_ * n_, 0.0) {
        // Row blocks write disjoint upper-triangle entries; mirror after.
        parallel_for(n_, threads, [&](std::size_t i) {
            const auto xi = data.row(i);
            for (std::size_t j = i + 1; j < n_; ++j) {
                dist_[i * n_ + j] = detail::power_of_distance(detail::squared_distance(xi, data.row(j)), alpha.value());
            }
        });
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) dist_[j * n_ + i] = dist_[i * n_ + j];
        }
    }

    std::size_t n() const noexcept { return n_; }
    Alpha alpha() const noexcept { return alpha_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return dist_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept { return {dist_.data() + i * n_, n_}; }

    /// Cache over a subset of the observations, in the given order.
    DistanceCache subset(std::span<const std::size_t> indices) const {
        DistanceCache out(indices.size(), alpha_);
        for (std::size_t a = 0; a < indices.size(); ++a) {
            for (std::size_t b = 0; b < indices.size(); ++b) {
                out.dist_[a * out.n_ + b] = (*this)(indices[a], indices[b]);
            }
        }
        return out;
    }

private:
    DistanceCache(std::size_t n, Alpha alpha) : n_(n), alpha_(alpha), dist_(n * n, 0.0) {}

    std::size_t n_;
    Alpha alpha_;
    std::vector<double> dist_;
};

namespace detail {

inline void check_index_set(std::span<const std::size_t> s, std::size_t n, const char* name) {
    if (s.empty()) throw InputError(std::string("index set ") + name + " is empty");
    for (std::size_t i : s) {
        if (i >= n) throw InputError(std::string("index set ") + name + " references point " + std::to_string(i) +
                                     " outside 0.." + std::to_string(n - 1));
    }
}

inline double cross_sum(std::span<const std::size_t> a, std::span<const std::size_t> b, const DistanceCache& cache) {
    CompensatedSum s;
    for (std::size_t i : a) {
        const auto r = cache.row(i);
        for (std::size_t j : b) s += r[j];
    }
    return s.value();
}

/// 2 G(A,B) - G(A,A) - G(B,B) without the disjointness check; the
/// m-point update formulas evaluate it with A inside B.
inline double energy_statistic(std::span<const std::size_t> a, std::span<const std::size_t> b,
                               const DistanceCache& cache) {
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    return 2.0 * cross_sum(a, b, cache) / (na * nb) - cross_sum(a, a, cache) / (na * na) -
           cross_sum(b, b, cache) / (nb * nb);
}

}  // namespace detail

/// G(A,B): mean alpha-distance over all pairs (a, b) in A x B.
inline double dispersion_g(std::span<const std::size_t> a, std::span<const std::size_t> b,
                           const DistanceCache& cache) {
    detail::check_index_set(a, cache.n(), "A");
    detail::check_index_set(b, cache.n(), "B");
    return detail::cross_sum(a, b, cache) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

/// Two-sample energy statistic between disjoint index sets. For a singleton
/// A = {a} this is the point-to-cluster statistic.
inline double two_sample_xi(std::span<const std::size_t> a, std::span<const std::size_t> b,
                            const DistanceCache& cache) {
    detail::check_index_set(a, cache.n(), "A");
    detail::check_index_set(b, cache.n(), "B");
    std::vector<char> in_a(cache.n(), 0);
    for (std::size_t i : a) in_a[i] = 1;
    for (std::size_t j : b) {
        if (in_a[j]) throw InputError("index sets overlap at point " + std::to_string(j));
    }
    // Evaluate symmetrically so xi(A,B) and xi(B,A) are bit-identical.
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ab = detail::cross_sum(a, b, cache);
    const double ba = detail::cross_sum(b, a, cache);
    const double cross = (ab + ba) / (na * nb);
    const double ga = detail::cross_sum(a, a, cache) / (na * na);
    const double gb = detail::cross_sum(b, b, cache) / (nb * nb);
    return cross - (ga + gb);
}

/// (|A||B| / (|A|+|B|)) times the two-sample statistic.
inline double weighted_statistic(std::span<const std::size_t> a, std::span<const std::size_t> b,
                                 const DistanceCache& cache) {
    const double xi = two_sample_xi(a, b, cache);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    return na * nb / (na + nb) * xi;
}

/// Total, within and between dispersion of a partition.
struct Disco {
    double total = 0.0;
    double within = 0.0;
    double between = 0.0;
};

/// Each component comes from its own formula over the cache:
///   T = (N/2) G(all, all)
///   W = sum_j (n_j/2) G(pi_j, pi_j)
///   B = sum_{i<j} (n_i n_j / 2N) (2 G(pi_i,pi_j) - G(pi_i,pi_i) - G(pi_j,pi_j))
inline Disco disco(const Partition& p, const DistanceCache& cache) {
    if (p.n() != cache.n()) {
        throw InputError("partition covers " + std::to_string(p.n()) + " points but the cache holds " +
                         std::to_string(cache.n()));
    }
    const std::size_t n = p.n();
    const std::size_t k = p.k();
    for (std::size_t c = 0; c < k; ++c) {
        if (p.size(c) == 0) throw InputError("cluster " + std::to_string(c) + " is empty");
    }

    CompensatedSum all;
    std::vector<CompensatedSum> block(k * k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = cache.row(i);
        const std::size_t li = p.label(i);
        for (std::size_t j = 0; j < n; ++j) {
            all += row[j];
            block[li * k + p.label(j)] += row[j];
        }
    }

    auto g = [&](std::size_t a, std::size_t b) {
        return block[a * k + b].value() / (static_cast<double>(p.size(a)) * static_cast<double>(p.size(b)));
    };
    const double nd = static_cast<double>(n);

    Disco out;
    out.total = all.value() / (2.0 * nd);

    CompensatedSum within;
    for (std::size_t c = 0; c < k; ++c) within += static_cast<double>(p.size(c)) / 2.0 * g(c, c);
    out.within = within.value();

    CompensatedSum between;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const double w = static_cast<double>(p.size(a)) * static_cast<double>(p.size(b)) / (2.0 * nd);
            between += w * (2.0 * g(a, b) - g(a, a) - g(b, b));
        }
    }
    out.between = between.value();
    return out;
}

}  // namespace kgroups
