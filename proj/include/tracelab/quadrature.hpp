#pragma once

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tracelab/encoder.hpp"

namespace tracelab {

inline constexpr double kQuadratureTolerance = 1e-12;
inline constexpr double kMinBias = 1e-150;

/// E[f(P)] for P drawn from `dist`. Arcsine variants are integrated in the
/// uniform variable u with p = sin^2(pi u / 2), which absorbs the
/// 1/sqrt(p(1-p)) endpoint singularity of the density. The scores themselves
/// still have logarithmic endpoint singularities in u, so the rule is
/// tanh-sinh rather than Gauss-Kronrod. Nodes with p below kMinBias or p
/// rounding to 1 are dropped; their weight is far below double precision.
template <class F>
double expect_over_bias(const BiasDistribution& dist, F&& f) {
    dist.validate();
    if (dist.kind == BiasDistribution::Kind::fixed) return f(dist.parameter);
    double lo = 0.0;
    double hi = 1.0;
    if (dist.kind == BiasDistribution::Kind::arcsine_with_cutoff) {
        lo = arcsine_cdf(dist.parameter);
        hi = arcsine_cdf(1.0 - dist.parameter);
    }
    auto integrand = [&](double u) {
        const double p = arcsine_inverse_cdf(u);
        return p > kMinBias && p < 1.0 ? f(p) : 0.0;
    };
    boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate(integrand, lo, hi, kQuadratureTolerance) / (hi - lo);
}

}  // namespace tracelab
