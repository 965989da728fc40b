#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <kgroups/energy.hpp>
#include <kgroups/partition.hpp>

#include "oracles.hpp"

using namespace kgroups;
using Idx = std::vector<std::size_t>;

namespace {

DataMatrix line(std::vector<double> xs) { return DataMatrix::column(xs); }

}  // namespace

TEST(Alpha, AcceptsOnlyTheHalfOpenRange) {
    EXPECT_NO_THROW(Alpha(2.0));
    EXPECT_NO_THROW(Alpha(1e-6));
    EXPECT_THROW(Alpha(0.0), InputError);
    EXPECT_THROW(Alpha(-1.0), InputError);
    EXPECT_THROW(Alpha(2.0000001), InputError);
    EXPECT_THROW(Alpha(std::numeric_limits<double>::quiet_NaN()), InputError);
}

TEST(AlphaDistance, HandValues) {
    const std::vector<double> o1{0.0}, two{2.0}, four{4.0};
    EXPECT_DOUBLE_EQ(alpha_distance(o1, two, Alpha(1.0)), 2.0);
    const std::vector<double> p{3.0, 4.0}, o2{0.0, 0.0};
    EXPECT_DOUBLE_EQ(alpha_distance(p, o2, Alpha(2.0)), 25.0);
    EXPECT_NEAR(alpha_distance(o1, four, Alpha(0.5)), std::exp(0.5 * std::log(4.0)), 1e-15);
    EXPECT_NEAR(alpha_distance(o1, four, Alpha(0.5)), 2.0, 1e-15);
}

TEST(AlphaDistance, ExactlyZeroForIdenticalPoints) {
    const std::vector<double> x{1.5, -2.25, 7.0};
    for (double a : {0.3, 0.5, 1.0, 1.7, 2.0}) EXPECT_EQ(alpha_distance(x, x, Alpha(a)), 0.0);
}

TEST(AlphaDistance, DimensionMismatchIsAnInputError) {
    const std::vector<double> x{1.0}, y{1.0, 2.0};
    EXPECT_THROW(alpha_distance(x, y, Alpha(1.0)), InputError);
}

TEST(AlphaDistance, MatchesPowOracle) {
    std::mt19937_64 gen(7);
    for (int t = 0; t < 200; ++t) {
        const auto pts = oracle::random_points(gen, 2, 1 + t % 5);
        const double a = 0.1 + 1.9 * (t % 20) / 19.0;
        EXPECT_LE(oracle::relative_gap(alpha_distance(pts[0], pts[1], Alpha(a)), oracle::dist_alpha(pts[0], pts[1], a)),
                  1e-13);
    }
}

TEST(DistanceCache, SymmetricZeroDiagonalNonnegative) {
    std::mt19937_64 gen(11);
    const auto pts = oracle::random_points(gen, 40, 3);
    const DataMatrix m = DataMatrix::from_rows(pts);
    for (std::size_t threads : {1u, 3u}) {
        const DistanceCache c(m, Alpha(0.7), threads);
        for (std::size_t i = 0; i < c.n(); ++i) {
            EXPECT_EQ(c(i, i), 0.0);
            for (std::size_t j = 0; j < c.n(); ++j) {
                EXPECT_EQ(c(i, j), c(j, i));
                EXPECT_GE(c(i, j), 0.0);
                EXPECT_LE(oracle::relative_gap(c(i, j), oracle::dist_alpha(pts[i], pts[j], 0.7)), 1e-13);
            }
        }
    }
}

TEST(DistanceCache, SubsetKeepsEntries) {
    const DistanceCache c(line({0, 1, 3, 7}), Alpha(1.0));
    const Idx keep{3, 1};
    const DistanceCache s = c.subset(keep);
    ASSERT_EQ(s.n(), 2u);
    EXPECT_EQ(s(0, 1), 6.0);
    EXPECT_EQ(s(0, 0), 0.0);
}

TEST(Dispersion, HandValues) {
    const DistanceCache c(line({0, 2}), Alpha(1.0));
    EXPECT_EQ(dispersion_g(Idx{0}, Idx{0}, c), 0.0);
    EXPECT_DOUBLE_EQ(dispersion_g(Idx{0, 1}, Idx{0, 1}, c), 1.0);
    EXPECT_DOUBLE_EQ(dispersion_g(Idx{0}, Idx{1}, c), 2.0);
}

TEST(Dispersion, EmptySetIsAnInputError) {
    const DistanceCache c(line({0, 2}), Alpha(1.0));
    EXPECT_THROW(dispersion_g(Idx{}, Idx{0}, c), InputError);
    EXPECT_THROW(dispersion_g(Idx{0}, Idx{}, c), InputError);
    EXPECT_THROW(dispersion_g(Idx{5}, Idx{0}, c), InputError);
}

TEST(Dispersion, SymmetricAndMatchesOracle) {
    std::mt19937_64 gen(3);
    const auto pts = oracle::random_points(gen, 30, 2);
    const DistanceCache c(DataMatrix::from_rows(pts), Alpha(1.3));
    const Idx a{0, 4, 7, 9, 22}, b{1, 2, 4, 29};
    EXPECT_NEAR(dispersion_g(a, b, c), dispersion_g(b, a, c), 1e-14);
    oracle::Points pa, pb;
    for (auto i : a) pa.push_back(pts[i]);
    for (auto i : b) pb.push_back(pts[i]);
    EXPECT_LE(oracle::relative_gap(dispersion_g(a, b, c), oracle::g(pa, pb, 1.3)), 1e-12);
}

TEST(TwoSampleXi, HandValues) {
    const DistanceCache c(line({0, 1, 2}), Alpha(1.0));
    // 2 * mean(1, 2) - 0 - mean(0, 1, 1, 0)
    EXPECT_DOUBLE_EQ(two_sample_xi(Idx{0}, Idx{1, 2}, c), 2.5);
    const DistanceCache d(line({0, 3.5}), Alpha(1.0));
    EXPECT_DOUBLE_EQ(two_sample_xi(Idx{0}, Idx{1}, d), 7.0);
}

TEST(TwoSampleXi, RejectsEmptyAndOverlappingSets) {
    const DistanceCache c(line({0, 1, 2}), Alpha(1.0));
    EXPECT_THROW(two_sample_xi(Idx{}, Idx{1}, c), InputError);
    EXPECT_THROW(two_sample_xi(Idx{0, 1}, Idx{1, 2}, c), InputError);
}

TEST(TwoSampleXi, ExactlySymmetric) {
    std::mt19937_64 gen(5);
    for (int t = 0; t < 50; ++t) {
        const auto pts = oracle::random_points(gen, 25, 3);
        const DistanceCache c(DataMatrix::from_rows(pts), Alpha(0.5 + (t % 4) * 0.5));
        Idx a, b;
        for (std::size_t i = 0; i < 25; ++i) ((i * 7 + t) % 3 == 0 ? a : b).push_back(i);
        EXPECT_EQ(two_sample_xi(a, b, c), two_sample_xi(b, a, c));
    }
}

TEST(TwoSampleXi, NonnegativeForSamplesFromOneDistribution) {
    std::mt19937_64 gen(17);
    for (int t = 0; t < 100; ++t) {
        const auto pts = oracle::random_points(gen, 60, 2, 1.0);
        for (double a : {0.5, 1.0, 1.5, 2.0}) {
            const DistanceCache c(DataMatrix::from_rows(pts), Alpha(a));
            Idx x, y;
            for (std::size_t i = 0; i < 60; ++i) (i < 30 ? x : y).push_back(i);
            EXPECT_GE(two_sample_xi(x, y, c), -1e-12);
        }
    }
}

TEST(WeightedStatistic, HandAndScaling) {
    const DistanceCache c(line({0, 2}), Alpha(1.0));
    EXPECT_DOUBLE_EQ(weighted_statistic(Idx{0}, Idx{1}, c), 2.0);

    std::mt19937_64 gen(9);
    const auto pts = oracle::random_points(gen, 20, 2);
    const DistanceCache d(DataMatrix::from_rows(pts), Alpha(1.0));
    Idx a, b;
    for (std::size_t i = 0; i < 20; ++i) (i % 2 ? a : b).push_back(i);
    EXPECT_NEAR(weighted_statistic(a, b, d), 10.0 / 2.0 * two_sample_xi(a, b, d), 1e-12);
}

TEST(WeightedStatistic, IdenticalMultisetsGiveZero) {
    const DistanceCache c(line({0.5, -1.0, 4.0, 0.5, -1.0, 4.0}), Alpha(1.0));
    EXPECT_NEAR(weighted_statistic(Idx{0, 1, 2}, Idx{3, 4, 5}, c), 0.0, 1e-12);
}

TEST(Disco, SingletonClusters) {
    const DistanceCache c(line({0, 2}), Alpha(1.0));
    const Disco d = disco(Partition({0, 1}, 2), c);
    EXPECT_DOUBLE_EQ(d.total, 1.0);
    EXPECT_DOUBLE_EQ(d.within, 0.0);
    EXPECT_DOUBLE_EQ(d.between, 1.0);
}

TEST(Disco, SingleClusterHasNoBetweenTerm) {
    std::mt19937_64 gen(2);
    const auto pts = oracle::random_points(gen, 15, 2);
    const DistanceCache c(DataMatrix::from_rows(pts), Alpha(1.0));
    const Disco d = disco(Partition(Idx(15, 0), 1), c);
    EXPECT_EQ(d.between, 0.0);
    EXPECT_NEAR(d.total, d.within, 1e-12 * d.total);
}

TEST(Disco, DecompositionMatchesIndependentFormulas) {
    std::mt19937_64 gen(23);
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = 5 + t % 30, k = 1 + t % 5, dim = 1 + t % 4;
        const double a = 0.25 + 1.75 * ((t * 37) % 100) / 99.0;
        const auto pts = oracle::random_points(gen, n, dim);
        const auto labels = oracle::random_labels(gen, n, k);
        const DistanceCache c(DataMatrix::from_rows(pts), Alpha(a));
        const Disco d = disco(Partition(labels, k), c);
        EXPECT_LE(std::abs(d.total - (d.within + d.between)), 1e-10 * std::max(1.0, d.total));
        EXPECT_GE(d.within, 0.0);
        EXPECT_GE(d.between, 0.0);
        EXPECT_LE(oracle::relative_gap(d.total, oracle::total(pts, a)), 1e-11);
        EXPECT_LE(oracle::relative_gap(d.within, oracle::within(pts, labels, k, a)), 1e-11);
        EXPECT_LE(oracle::relative_gap(d.between, oracle::between(pts, labels, k, a)), 1e-10);
    }
}

TEST(Disco, AlphaTwoWithinIsSumOfSquares) {
    std::mt19937_64 gen(31);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 10 + t, k = 1 + t % 4;
        const auto pts = oracle::random_points(gen, n, 1 + t % 3);
        const auto labels = oracle::random_labels(gen, n, k);
        const DistanceCache c(DataMatrix::from_rows(pts), Alpha(2.0));
        EXPECT_LE(oracle::relative_gap(disco(Partition(labels, k), c).within, oracle::sum_of_squares(pts, labels, k)),
                  1e-9);
    }
}
