#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <kgroups/datagen.hpp>
#include <kgroups/random.hpp>

using namespace kgroups;

TEST(Rng, StreamIsTheStandardEngineAfterSeedMixing) {
    // The engine itself is pinned by the standard: 10000th draw of the
    // default-constructed mt19937_64.
    std::mt19937_64 ref;
    ref.discard(9999);
    EXPECT_EQ(ref(), 9981545732273789042ULL);

    for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL}) {
        Rng rng(seed);
        std::mt19937_64 raw(mix_seed(seed));
        for (int i = 0; i < 100; ++i) EXPECT_EQ(rng.uniform(), static_cast<double>(raw() >> 11) * 0x1.0p-53);
    }
}

TEST(Rng, SeedMixingIsSplitMix) {
    // splitmix64 finalizer applied to 0 + golden gamma.
    EXPECT_EQ(mix_seed(0), 0xe220a8397b1dcdafULL);
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
    Rng rng(3);
    std::vector<int> seen(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        ++seen[v];
    }
    for (int c : seen) EXPECT_NEAR(c, 1000, 150);
}

TEST(Rng, CauchyQuantileAtHalfIsZero) {
    EXPECT_EQ(Rng::cauchy_quantile(0.5), 0.0);
    EXPECT_NEAR(Rng::cauchy_quantile(0.75), 1.0, 1e-12);
    EXPECT_NEAR(Rng::cauchy_quantile(0.25), -1.0, 1e-12);
}

TEST(Rng, NormalMoments) {
    Rng rng(8);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Generate, DeterministicPerSeed) {
    const auto a = generate(location_mixture(Family::normal, 3.0, 200, 2, 7));
    const auto b = generate(location_mixture(Family::normal, 3.0, 200, 2, 7));
    const auto c = generate(location_mixture(Family::normal, 3.0, 200, 2, 8));
    EXPECT_TRUE(a.data == b.data);
    EXPECT_EQ(a.truth, b.truth);
    EXPECT_FALSE(a.data == c.data);
}

TEST(Generate, ZeroScaleNormalIsAPointMass) {
    MixtureSpec spec;
    spec.components = {{1.0, Family::normal, 2.5, 0.0}};
    spec.n = 50;
    spec.dim = 3;
    const auto s = generate(spec);
    for (double v : s.data.values()) EXPECT_EQ(v, 2.5);
}

TEST(Generate, NormalMixtureMean) {
    const auto s = generate(location_mixture(Family::normal, 3.0, 10000, 1, 11));
    double m = 0;
    for (double v : s.data.values()) m += v;
    EXPECT_NEAR(m / 10000, 1.5, 0.05);
}

TEST(Generate, CubicSupport) {
    MixtureSpec spec;
    spec.components = {{1.0, Family::cubic_uniform, 0.0, 1.0}};
    spec.dim = 20;
    spec.n = 500;
    spec.seed = 4;
    for (double v : generate(spec).data.values()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    const auto mix = generate(cubic_mixture(20, 400, 5));
    for (std::size_t i = 0; i < mix.data.rows(); ++i) {
        if (mix.truth[i] != 1) continue;
        for (double v : mix.data.row(i)) {
            EXPECT_GE(v, 0.3);
            EXPECT_LE(v, 0.7);
        }
    }
}

TEST(Generate, ComponentCountsAverageHalf) {
    double total = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto sample = generate(location_mixture(Family::normal, 3.0, 200, 1, s));
        total += static_cast<double>(std::count(sample.truth.begin(), sample.truth.end(), 0u));
    }
    EXPECT_NEAR(total / 1000, 100.0, 2.0);
}

TEST(Generate, LognormalIsExpOfNormal) {
    MixtureSpec spec;
    spec.components = {{1.0, Family::lognormal, 0.7, 1.3}};
    spec.n = 100000;
    spec.seed = 21;
    const auto s = generate(spec);
    double m = 0, m2 = 0;
    for (double v : s.data.values()) {
        ASSERT_GT(v, 0.0);
        m += std::log(v);
    }
    m /= spec.n;
    for (double v : s.data.values()) m2 += (std::log(v) - m) * (std::log(v) - m);
    EXPECT_NEAR(m, 0.7, 0.02);
    EXPECT_NEAR(std::sqrt(m2 / (spec.n - 1)), 1.3, 0.02);
}

TEST(Generate, InvalidSpecsAreInputErrors) {
    MixtureSpec spec;
    spec.components = {{1.0, Family::lognormal, 0.0, 0.0}};
    EXPECT_THROW(generate(spec), InputError);
    spec.components = {{0.6, Family::normal, 0.0, 1.0}, {0.6, Family::normal, 1.0, 1.0}};
    EXPECT_THROW(generate(spec), InputError);
    spec.components = {{1.0, Family::cubic_uniform, 1.0, 1.0}};
    EXPECT_THROW(generate(spec), InputError);
    spec.components = {{1.0, Family::cauchy, 0.0, -1.0}};
    EXPECT_THROW(generate(spec), InputError);
    spec.components = {{1.0, Family::normal, 0.0, 1.0}};
    spec.dim = 0;
    EXPECT_THROW(generate(spec), InputError);
    EXPECT_THROW(parse_family("gamma"), InputError);
}

namespace {

double median(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

}  // namespace

TEST(CauchySample, MedianNearLocation) {
    EXPECT_NEAR(median(cauchy_sample(0.0, 1.0, 100001, 1)), 0.0, 0.03);
    EXPECT_NEAR(median(cauchy_sample(3.0, 1.0, 100001, 2)), 3.0, 0.03);
}

TEST(CauchySample, NonPositiveScaleIsAnInputError) {
    EXPECT_THROW(cauchy_sample(0.0, 0.0, 10, 1), InputError);
    EXPECT_THROW(cauchy_sample(0.0, -2.0, 10, 1), InputError);
}
