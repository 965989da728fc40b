#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "data_matrix.hpp"
#include "error.hpp"
#include "random.hpp"

namespace kgroups {

enum class Family { normal, lognormal, cauchy, cubic_uniform };

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::normal: return "normal";
        case Family::lognormal: return "lognormal";
        case Family::cauchy: return "cauchy";
        case Family::cubic_uniform: return "cubic";
    }
    return "?";
}

inline Family parse_family(std::string_view s) {
    if (s == "normal") return Family::normal;
    if (s == "lognormal") return Family::lognormal;
    if (s == "cauchy") return Family::cauchy;
    if (s == "cubic" || s == "cubic_uniform") return Family::cubic_uniform;
    throw InputError("unknown distribution family '" + std::string(s) + "'");
}

/// One mixture component. Every coordinate is drawn independently from the
/// same univariate law:
///   normal         N(a, b^2)           (b = 0 gives a point mass at a)
///   lognormal      exp(N(a, b^2))
///   cauchy         Cauchy(a, b)
///   cubic_uniform  Uniform(a, b)
struct Component {
    double weight = 1.0;
    Family family = Family::normal;
    double a = 0.0;
    double b = 1.0;
};

struct MixtureSpec {
    std::vector<Component> components;
    std::size_t dim = 1;
    std::size_t n = 200;
    std::uint64_t seed = 0;

    void validate() const {
        if (components.empty()) throw InputError("mixture has no components");
        if (dim == 0) throw InputError("mixture dimension must be at least 1");
        if (n == 0) throw InputError("sample size must be at least 1");
        double total = 0.0;
        for (std::size_t c = 0; c < components.size(); ++c) {
            const auto& comp = components[c];
            const std::string where = "component " + std::to_string(c) + ": ";
            if (!(comp.weight > 0.0)) throw InputError(where + "weight must be positive");
            total += comp.weight;
            if (!std::isfinite(comp.a) || !std::isfinite(comp.b)) throw InputError(where + "parameters must be finite");
            switch (comp.family) {
                case Family::normal:
                    if (comp.b < 0.0) throw InputError(where + "normal standard deviation must be >= 0");
                    break;
                case Family::lognormal:
                    if (comp.b <= 0.0) throw InputError(where + "lognormal scale must be > 0");
                    break;
                case Family::cauchy:
                    if (comp.b <= 0.0) throw InputError(where + "cauchy scale must be > 0");
                    break;
                case Family::cubic_uniform:
                    if (!(comp.a < comp.b)) throw InputError(where + "uniform bounds need a < b");
                    break;
            }
        }
        if (std::abs(total - 1.0) > 1e-9) throw InputError("mixture weights sum to " + std::to_string(total));
    }
};

/// Observations plus the index of the component that generated each row.
struct LabeledSample {
    DataMatrix data;
    std::vector<std::size_t> truth;
    std::size_t components = 0;
};

inline double draw(Rng& rng, const Component& c) {
    switch (c.family) {
        case Family::normal: return rng.normal(c.a, c.b);
        case Family::lognormal: return std::exp(rng.normal(c.a, c.b));
        case Family::cauchy: return rng.cauchy(c.a, c.b);
        case Family::cubic_uniform: return rng.uniform(c.a, c.b);
    }
    return 0.0;
}

/// Row by row: one uniform picks the component by cumulative weight, then
/// `dim` coordinates are drawn from it.
inline LabeledSample generate(const MixtureSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& c : spec.components) cumulative.push_back(acc += c.weight);

    std::vector<double> values;
    values.reserve(spec.n * spec.dim);
    std::vector<std::size_t> truth(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double u = rng.uniform() * acc;
        std::size_t comp = 0;
        while (comp + 1 < cumulative.size() && u >= cumulative[comp]) ++comp;
        truth[i] = comp;
        for (std::size_t d = 0; d < spec.dim; ++d) values.push_back(draw(rng, spec.components[comp]));
    }
    return {DataMatrix(spec.n, spec.dim, std::move(values)), std::move(truth), spec.components.size()};
}

/// n draws of location + scale * tan(pi (U - 1/2)).
inline std::vector<double> cauchy_sample(double location, double scale, std::size_t n, std::uint64_t seed) {
    if (!(scale > 0.0)) throw InputError("cauchy scale must be > 0");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = rng.cauchy(location, scale);
    return out;
}

/// 0.5 F(0) + 0.5 F(d) for the location families, with unit scale.
inline MixtureSpec location_mixture(Family family, double separation, std::size_t n, std::size_t dim,
                                    std::uint64_t seed) {
    MixtureSpec spec;
    spec.components = {{0.5, family, 0.0, 1.0}, {0.5, family, separation, 1.0}};
    spec.dim = dim;
    spec.n = n;
    spec.seed = seed;
    return spec;
}

/// 0.5 Uniform(0,1)^dim + 0.5 Uniform(0.3,0.7)^dim.
inline MixtureSpec cubic_mixture(std::size_t dim, std::size_t n, std::uint64_t seed) {
    MixtureSpec spec;
    spec.components = {{0.5, Family::cubic_uniform, 0.0, 1.0}, {0.5, Family::cubic_uniform, 0.3, 0.7}};
    spec.dim = dim;
    spec.n = n;
    spec.seed = seed;
    return spec;
}

}  // namespace kgroups
