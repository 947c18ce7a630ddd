#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "tracelab/model.hpp"

namespace tracelab {

/// Distribution of the per-segment biases p_i.
struct BiasDistribution {
    enum class Kind { arcsine, arcsine_with_cutoff, fixed };

    Kind kind = Kind::arcsine;
    double parameter = 0.0;  // cutoff t for arcsine_with_cutoff, p for fixed

    static BiasDistribution arcsine() { return {Kind::arcsine, 0.0}; }
    static BiasDistribution arcsine_with_cutoff(double t) { return {Kind::arcsine_with_cutoff, t}; }
    static BiasDistribution fixed(double p) { return {Kind::fixed, p}; }

    void validate() const;
    std::string describe() const;

    friend bool operator==(const BiasDistribution&, const BiasDistribution&) = default;
};

/// F(p) = (2/pi) asin(sqrt(p)).
double arcsine_cdf(double p);

/// sin^2(pi u / 2), the inverse of arcsine_cdf on [0,1].
double arcsine_inverse_cdf(double u);

/// Maps a uniform draw u in (0,1) to a bias from `dist`, clamped into the
/// open interval so that no entry rounds to 0 or 1.
double bias_from_uniform(const BiasDistribution& dist, double u);

/// Bias of a 1-based segment under the counter-based bias stream `key`.
double bias_at(const BiasDistribution& dist, std::uint64_t key, std::size_t segment);

/// Codeword bit of (user, segment) under the counter-based code stream `key`.
/// Generating lazily through this function and materializing through
/// generate_code yield the same code.
int code_bit(std::uint64_t key, std::size_t user, std::size_t segment, double p);

/// Length-`length` bias vector; deterministic in `seed`.
BiasVector sample_bias_vector(const BiasDistribution& dist, std::size_t length, std::uint64_t seed);

/// users x length Bernoulli(p_i) code; deterministic in `seed`. Uses a code
/// sub-stream distinct from the bias sub-stream of the same seed.
CodeMatrix generate_code(const BiasVector& bias, std::size_t users, std::uint64_t seed);

}  // namespace tracelab
