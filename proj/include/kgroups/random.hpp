#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

namespace kgroups {

/// splitmix64 finalizer. Used to turn (seed, stream index) pairs into
/// well-mixed engine seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for the `index`-th independent stream below `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix_seed(base ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

/// Portable random source.
///
/// The engine is `std::mt19937_64`, whose output sequence is fixed by the
/// C++ standard. Every transform on top of it is implemented here rather
/// than through `<random>` distributions (whose algorithms are
/// implementation-defined), so a given seed yields the same numbers on
/// every platform and standard library:
///
///  - `uniform()`      top 53 bits of one draw scaled to [0,1)
///  - `uniform_open()` same draw shifted by half an ulp, in (0,1)
///  - `below(n)`       rejection sampling on the raw 64-bit draw
///  - `normal()`       Box-Muller on (uniform_open, uniform); the sine
///                     branch is cached and returned on the next call
///  - `cauchy()`       inverse CDF, tan(pi * (u - 1/2))
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    double normal() {
        if (spare_) {
            double z = *spare_;
            spare_.reset();
            return z;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double cauchy(double location, double scale) {
        return location + scale * cauchy_quantile(uniform_open());
    }

    /// Standard Cauchy quantile function.
    static double cauchy_quantile(double u) {
        if (u == 0.5) return 0.0;
        return std::tan(std::numbers::pi * (u - 0.5));
    }

    template <class RandomIt>
    void shuffle(RandomIt first, RandomIt last) {
        const auto n = last - first;
        for (auto i = n - 1; i > 0; --i) {
            auto j = static_cast<decltype(i)>(below(static_cast<std::uint64_t>(i) + 1));
            std::iter_swap(first + i, first + j);
        }
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace kgroups
