#pragma once

#include <cstddef>
#include <optional>

#include "tracelab/channel.hpp"
#include "tracelab/encoder.hpp"

namespace tracelab {

/// d_KL(a || b) = a ln(a/b) + (1-a) ln((1-a)/(1-b)) in nats, with 0 ln 0 = 0.
double kl_divergence(double a, double b);

/// Expected SPRT decision times (segments). The H0 fields are empty when
/// there is no acquittal boundary (eps2' = 0).
struct TerminationPrediction {
    std::optional<double> expected_T_h0;  // exact-KL lower bound
    double expected_T_h1 = 0.0;
    std::optional<double> approx_T_h0;    // ln(1/eps2') / -mu0
    double approx_T_h1 = 0.0;             // ln(1/eps1') / mu1
};

TerminationPrediction expected_termination(double eps1, double eps2, double mu0, double mu1);

/// 2 c^2 ln n.
double asymptotic_code_length(std::size_t c, double n);

/// Mutual information between one colluder's symbol and the pirate output,
/// averaged over the bias distribution.
struct InformationRate {
    double nats = 0.0;  // per segment; equals the matched decoder's guilty drift
    double bits = 0.0;

    /// Lower bound on the expected time to accuse a colluder:
    /// log2(n) / bits = ln(n) / nats.
    double min_expected_catch_time(double n) const;
};

InformationRate mutual_info_rate(const CollusionChannel& channel, const BiasDistribution& dist);

/// Interleaving-attack drifts from their explicit arcsine-weighted integrals,
/// evaluated directly in p with a double-exponential rule.
struct AppendixIntegral {
    std::size_t c = 0;
    double I = 0.0;    // integral of sqrt(p(1-p)) ln(1 + c / ((c-1)^2 p (1-p))) over (0,1)
    double mu0 = 0.0;  // innocent drift
    double mu1 = 0.0;  // guilty drift

    double upper_bound() const;        // pi c / (c-1)^2, from ln(1+x) < x
    double identity_residual() const;  // (mu1 - mu0) - I / (pi c), zero up to quadrature error
};

AppendixIntegral appendix_integral(std::size_t c);

struct GroupTestingLengths {
    double simple = 0.0;  // c ln n / (ln 2)^2
    double joint = 0.0;   // c log2 n
};

GroupTestingLengths group_testing_lengths(std::size_t c, double n);

}  // namespace tracelab
