#include "tracelab/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tracelab/rng.hpp"

namespace tracelab {

void BiasDistribution::validate() const {
    switch (kind) {
        case Kind::arcsine: return;
        case Kind::arcsine_with_cutoff:
            require(parameter > 0.0 && parameter < 0.5, "arcsine cutoff t must satisfy 0 < t < 1/2");
            return;
        case Kind::fixed:
            require(parameter > 0.0 && parameter < 1.0, "fixed bias p must satisfy 0 < p < 1");
            return;
    }
}

std::string BiasDistribution::describe() const {
    std::ostringstream out;
    out.precision(17);
    switch (kind) {
        case Kind::arcsine: out << "arcsine"; break;
        case Kind::arcsine_with_cutoff: out << "arcsine_cutoff(" << parameter << ")"; break;
        case Kind::fixed: out << "fixed(" << parameter << ")"; break;
    }
    return out.str();
}

double arcsine_cdf(double p) {
    require(p >= 0.0 && p <= 1.0, "arcsine_cdf requires p in [0,1]");
    return 2.0 / std::numbers::pi * std::asin(std::sqrt(p));
}

double arcsine_inverse_cdf(double u) {
    require(u >= 0.0 && u <= 1.0, "arcsine_inverse_cdf requires u in [0,1]");
    const double s = std::sin(std::numbers::pi * u / 2.0);
    return s * s;
}

double bias_from_uniform(const BiasDistribution& dist, double u) {
    constexpr double lowest = std::numeric_limits<double>::min();
    constexpr double highest = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    double p = 0.0;
    switch (dist.kind) {
        case BiasDistribution::Kind::fixed:
            return dist.parameter;
        case BiasDistribution::Kind::arcsine:
            p = arcsine_inverse_cdf(u);
            break;
        case BiasDistribution::Kind::arcsine_with_cutoff: {
            const double lo = arcsine_cdf(dist.parameter);
            const double hi = arcsine_cdf(1.0 - dist.parameter);
            p = arcsine_inverse_cdf(lo + u * (hi - lo));
            return std::clamp(p, dist.parameter, 1.0 - dist.parameter);
        }
    }
    return std::clamp(p, lowest, highest);
}

double bias_at(const BiasDistribution& dist, std::uint64_t key, std::size_t segment) {
    return bias_from_uniform(dist, to_open_unit(mix(key, segment)));
}

int code_bit(std::uint64_t key, std::size_t user, std::size_t segment, double p) {
    return to_open_unit(mix(key, user, segment)) < p ? 1 : 0;
}

BiasVector sample_bias_vector(const BiasDistribution& dist, std::size_t length, std::uint64_t seed) {
    dist.validate();
    require(length >= 1, "segment count must be >= 1");
    const std::uint64_t key = derive_key(seed, Stream::bias);
    std::vector<double> values(length);
    for (std::size_t i = 1; i <= length; ++i) values[i - 1] = bias_at(dist, key, i);
    return BiasVector(std::move(values));
}

CodeMatrix generate_code(const BiasVector& bias, std::size_t users, std::uint64_t seed) {
    require(users >= 1, "user count n must be >= 1");
    const std::uint64_t key = derive_key(seed, Stream::code);
    CodeMatrix code(users, bias.length());
    for (std::size_t j = 0; j < users; ++j) {
        for (std::size_t i = 1; i <= bias.length(); ++i) {
            code.set(j, i, code_bit(key, j, i, bias.at(i)));
        }
    }
    return code;
}

}  // namespace tracelab
