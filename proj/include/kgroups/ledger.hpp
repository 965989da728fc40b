#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "energy.hpp"
#include "error.hpp"
#include "partition.hpp"
#include "summation.hpp"

namespace kgroups {

/// Point-to-cluster distance sums for one partition over one cache.
///
///   sum(i, k)  = sum over j in cluster k of dist(i, j)
///   within(k)  = sum over unordered pairs {i, j} in cluster k of dist(i, j)
///
/// With these, the point-to-cluster statistic and both update weights cost
/// O(1), and relocating a point costs O(n).
class ClusterSumLedger {
public:
    ClusterSumLedger(const DistanceCache& cache, const Partition& p)
        : cache_(&cache), n_(cache.n()), k_(p.k()), sums_(n_ * k_, 0.0), within_(k_) {
        if (p.n() != n_) {
            throw InputError("partition covers " + std::to_string(p.n()) + " points but the cache holds " +
                             std::to_string(n_));
        }
        rebuild(p);
    }

    /// Recomputes every entry from the cache, discarding accumulated
    /// rounding from incremental updates.
    void rebuild(const Partition& p) {
        for (std::size_t i = 0; i < n_; ++i) {
            std::vector<CompensatedSum> acc(k_);
            const auto row = cache_->row(i);
            for (std::size_t j = 0; j < n_; ++j) acc[p.label(j)] += row[j];
            for (std::size_t c = 0; c < k_; ++c) sums_[i * k_ + c] = acc[c].value();
        }
        std::vector<CompensatedSum> w(k_);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto row = cache_->row(i);
            const std::size_t li = p.label(i);
            for (std::size_t j = i + 1; j < n_; ++j) {
                if (p.label(j) == li) w[li] += row[j];
            }
        }
        for (std::size_t c = 0; c < k_; ++c) within_[c] = w[c].value();
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    const DistanceCache& cache() const noexcept { return *cache_; }

    double sum(std::size_t i, std::size_t c) const noexcept { return sums_[i * k_ + c]; }
    double within(std::size_t c) const noexcept { return within_[c]; }

    /// Within-cluster dispersion W = sum_k within(k) / n_k.
    double objective(const Partition& p) const {
        CompensatedSum w;
        for (std::size_t c = 0; c < k_; ++c) w += within_[c] / static_cast<double>(p.size(c));
        return w.value();
    }

    /// Energy statistic between point i and cluster c. i may or may not be a
    /// member of c; its own zero self-distance leaves the formula unchanged.
    double point_xi(std::size_t i, std::size_t c, const Partition& p) const noexcept {
        const double nc = static_cast<double>(p.size(c));
        return 2.0 * sum(i, c) / nc - 2.0 * within_[c] / (nc * nc);
    }

    /// Energy statistic between a set of points and cluster c, the set being
    /// either inside c or disjoint from it.
    double set_xi(std::span<const std::size_t> s, std::size_t c, const Partition& p) const {
        const double m = static_cast<double>(s.size());
        const double nc = static_cast<double>(p.size(c));
        CompensatedSum to_cluster;
        CompensatedSum among;
        for (std::size_t a : s) {
            to_cluster += sum(a, c);
            for (std::size_t b : s) among += (*cache_)(a, b);
        }
        return 2.0 * to_cluster.value() / (m * nc) - among.value() / (m * m) - 2.0 * within_[c] / (nc * nc);
    }

    /// Updates the sums for relocating point i from `from` to `to`. Does not
    /// touch the partition; see `move_point`.
    void apply_move(std::size_t i, std::size_t from, std::size_t to) {
        within_[from] -= sum(i, from);
        within_[to] += sum(i, to);
        const auto row = cache_->row(i);
        for (std::size_t j = 0; j < n_; ++j) {
            sums_[j * k_ + from] -= row[j];
            sums_[j * k_ + to] += row[j];
        }
    }

private:
    const DistanceCache* cache_;
    std::size_t n_;
    std::size_t k_;
    std::vector<double> sums_;
    std::vector<double> within_;
};

/// Relocates point i to cluster `to`, keeping partition and ledger in step.
inline void move_point(Partition& p, ClusterSumLedger& ledger, std::size_t i, std::size_t to) {
    if (i >= p.n()) throw InputError("point index " + std::to_string(i) + " out of range");
    if (to >= p.k()) throw InputError("cluster " + std::to_string(to) + " out of range");
    const std::size_t from = p.label(i);
    if (from == to) throw RejectedMove("point " + std::to_string(i) + " is already in cluster " + std::to_string(to));
    if (p.size(from) < 2) {
        throw RejectedMove("moving point " + std::to_string(i) + " would empty cluster " + std::to_string(from));
    }
    ledger.apply_move(i, from, to);
    p.move(i, to);
}

}  // namespace kgroups
