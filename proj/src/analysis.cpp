#include "tracelab/analysis.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tracelab/model.hpp"
#include "tracelab/quadrature.hpp"

namespace tracelab {

namespace {

double xlogx_over(double a, double b) { return a == 0.0 ? 0.0 : a * std::log(a / b); }

// Binary entropy in nats.
double entropy(double q) {
    double h = 0.0;
    if (q > 0.0) h -= q * std::log(q);
    if (q < 1.0) h -= (1.0 - q) * std::log1p(-q);
    return h;
}

// Integrates f(p, 1-p) against the arcsine density over (0,1) without any
// change of variable; tanh-sinh copes with the endpoint singularities and the
// complement argument keeps 1-p accurate near p = 1.
template <class F>
double arcsine_weighted(F&& f) {
    boost::math::quadrature::tanh_sinh<double> rule;
    auto integrand = [&](double x, double xc) {
        const double p = xc < 0.0 ? -xc : (x <= 0.5 ? x : 1.0 - xc);
        const double q = xc > 0.0 ? xc : 1.0 - p;
        if (p <= 0.0 || q <= 0.0) return 0.0;
        return f(p, q) / (std::numbers::pi * std::sqrt(p * q));
    };
    return rule.integrate(integrand, 0.0, 1.0, 1e-13);
}

template <class F>
double plain(F&& f) {
    boost::math::quadrature::tanh_sinh<double> rule;
    auto integrand = [&](double x, double xc) {
        const double p = xc < 0.0 ? -xc : (x <= 0.5 ? x : 1.0 - xc);
        const double q = xc > 0.0 ? xc : 1.0 - p;
        if (p <= 0.0 || q <= 0.0) return 0.0;
        return f(p, q);
    };
    return rule.integrate(integrand, 0.0, 1.0, 1e-13);
}

}  // namespace

double kl_divergence(double a, double b) {
    require(a >= 0.0 && a <= 1.0, "kl_divergence requires a in [0,1]");
    require(b >= 0.0 && b <= 1.0, "kl_divergence requires b in [0,1]");
    if (b == 0.0) require(a == 0.0, "kl_divergence undefined: b = 0 with a > 0");
    if (b == 1.0) require(a == 1.0, "kl_divergence undefined: b = 1 with a < 1");
    const double d = xlogx_over(a, b) + xlogx_over(1.0 - a, 1.0 - b);
    return d > 0.0 ? d : 0.0;
}

TerminationPrediction expected_termination(double eps1, double eps2, double mu0, double mu1) {
    require(mu0 < 0.0 && mu1 > 0.0, "drifts must satisfy mu0 < 0 < mu1");
    require(eps1 >= 0.0 && eps1 < 1.0 && eps2 >= 0.0 && eps2 < 1.0, "per-user epsilons must lie in [0,1)");
    require(eps1 > 0.0 || eps2 > 0.0, "eps1' and eps2' must not both be 0");
    TerminationPrediction t;
    t.expected_T_h1 = kl_divergence(eps2, 1.0 - eps1) / mu1;
    t.approx_T_h1 = std::log(1.0 / eps1) / mu1;
    if (eps2 > 0.0) {
        t.expected_T_h0 = kl_divergence(eps1, 1.0 - eps2) / -mu0;
        t.approx_T_h0 = std::log(1.0 / eps2) / -mu0;
    }
    return t;
}

double asymptotic_code_length(std::size_t c, double n) {
    require(c >= 1, "coalition size c must be >= 1");
    require(n >= 2.0, "user count n must be >= 2");
    const double cc = static_cast<double>(c);
    return 2.0 * cc * cc * std::log(n);
}

double InformationRate::min_expected_catch_time(double n) const {
    require(n >= 2.0, "user count n must be >= 2");
    return std::log2(n) / bits;
}

InformationRate mutual_info_rate(const CollusionChannel& channel, const BiasDistribution& dist) {
    const std::size_t c = channel.coalition_size();
    // I(X1; Y | p) = H(Y | p) - H(Y | X1, p).
    auto info = [&](double p) {
        double y_given_one = 0.0;
        double y_given_zero = 0.0;
        for (std::size_t z = 0; z + 1 <= c; ++z) {
            const double w = binomial_pmf(c - 1, z, p);
            y_given_zero += w * channel.theta(z);
            y_given_one += w * channel.theta(z + 1);
        }
        const double y_marginal = p * y_given_one + (1.0 - p) * y_given_zero;
        return entropy(y_marginal) - p * entropy(y_given_one) - (1.0 - p) * entropy(y_given_zero);
    };
    InformationRate rate;
    rate.nats = expect_over_bias(dist, info);
    require(rate.nats > 1e-15, "degenerate channel: pirate output carries no information about a colluder");
    rate.bits = rate.nats / std::numbers::ln2;
    return rate;
}

double AppendixIntegral::upper_bound() const {
    const double cc = static_cast<double>(c);
    return std::numbers::pi * cc / ((cc - 1.0) * (cc - 1.0));
}

double AppendixIntegral::identity_residual() const {
    return (mu1 - mu0) - I / (std::numbers::pi * static_cast<double>(c));
}

AppendixIntegral appendix_integral(std::size_t c) {
    require(c >= 2, "appendix integral requires c >= 2");
    const double cc = static_cast<double>(c);
    auto g11 = [cc](double p, double q) { return std::log1p(q / (cc * p)); };
    auto g00 = [cc](double p, double q) { return std::log1p(p / (cc * q)); };
    const double gx = std::log1p(-1.0 / cc);

    AppendixIntegral out;
    out.c = c;
    out.mu0 = arcsine_weighted([&](double p, double q) {
        return p * p * g11(p, q) + 2.0 * p * q * gx + q * q * g00(p, q);
    });
    out.mu1 = arcsine_weighted([&](double p, double q) {
        return p * p * (1.0 + q / (cc * p)) * g11(p, q) + 2.0 * p * q * (1.0 - 1.0 / cc) * gx +
               q * q * (1.0 + p / (cc * q)) * g00(p, q);
    });
    out.I = plain([&](double p, double q) {
        const double pq = p * q;
        return std::sqrt(pq) * std::log1p(cc / ((cc - 1.0) * (cc - 1.0) * pq));
    });
    return out;
}

GroupTestingLengths group_testing_lengths(std::size_t c, double n) {
    require(c >= 1, "coalition size c must be >= 1");
    require(n >= 2.0, "user count n must be >= 2");
    const double cc = static_cast<double>(c);
    return {cc * std::log(n) / (std::numbers::ln2 * std::numbers::ln2), cc * std::log2(n)};
}

}  // namespace tracelab
