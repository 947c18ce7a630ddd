#include "tracelab/channel.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <cmath>
#include <string>

#include "tracelab/model.hpp"

namespace tracelab {

std::string_view to_string(AttackKind kind) noexcept {
    switch (kind) {
        case AttackKind::interleaving: return "interleaving";
        case AttackKind::all_one: return "all_one";
        case AttackKind::majority: return "majority";
        case AttackKind::minority: return "minority";
        case AttackKind::coin: return "coin";
    }
    return "unknown";
}

AttackKind parse_attack(std::string_view name) {
    for (auto kind : {AttackKind::interleaving, AttackKind::all_one, AttackKind::majority,
                      AttackKind::minority, AttackKind::coin}) {
        if (name == to_string(kind)) return kind;
    }
    if (name == "all-one" || name == "all1") return AttackKind::all_one;
    throw PreconditionError("unknown attack '" + std::string(name) +
                            "' (expected interleaving, all_one, majority, minority or coin)");
}

CollusionChannel::CollusionChannel(std::vector<double> theta) : theta_(std::move(theta)) {
    require(theta_.size() >= 2, "collusion channel needs coalition size c >= 1");
    for (double t : theta_) require(t >= 0.0 && t <= 1.0, "theta entries must lie in [0,1]");
    require(theta_.front() == 0.0 && theta_.back() == 1.0,
            "marking assumption violated: theta_0 must be 0 and theta_c must be 1");
}

CollusionChannel make_attack(AttackKind kind, std::size_t c) {
    require(c >= 1, "attack requires coalition size c >= 1");
    std::vector<double> theta(c + 1, 0.0);
    const bool even = c % 2 == 0;
    for (std::size_t z = 1; z < c; ++z) {
        switch (kind) {
            case AttackKind::interleaving:
                theta[z] = static_cast<double>(z) / static_cast<double>(c);
                break;
            case AttackKind::all_one:
                theta[z] = 1.0;
                break;
            case AttackKind::majority:
                theta[z] = (even && 2 * z == c) ? 0.5 : (2 * z > c ? 1.0 : 0.0);
                break;
            case AttackKind::minority:
                theta[z] = (even && 2 * z == c) ? 0.5 : (2 * z < c ? 1.0 : 0.0);
                break;
            case AttackKind::coin:
                theta[z] = 0.5;
                break;
        }
    }
    theta[0] = 0.0;
    theta[c] = 1.0;
    return CollusionChannel(std::move(theta));
}

double binomial_pmf(std::size_t n, std::size_t k, double p) {
    if (k > n) return 0.0;
    return boost::math::pdf(boost::math::binomial_distribution<double>(static_cast<double>(n), p),
                            static_cast<double>(k));
}

double marginal_output_prob(const CollusionChannel& channel, double p) {
    require(p > 0.0 && p < 1.0, "bias p must lie strictly in (0,1)");
    const std::size_t c = channel.coalition_size();
    double total = 0.0;
    for (std::size_t z = 0; z <= c; ++z) total += binomial_pmf(c, z, p) * channel.theta(z);
    return total;
}

int pirate_output(const CollusionChannel& channel, std::size_t ones, CounterRng& rng) {
    require(ones <= channel.coalition_size(), "more ones than colluders");
    const double u = rng.uniform();
    return u < channel.theta(ones) ? 1 : 0;
}

int pirate_output(const CollusionChannel& channel, std::span<const std::uint8_t> colluder_bits,
                  CounterRng& rng) {
    require(!colluder_bits.empty(), "empty coalition: all colluders are disconnected");
    require(colluder_bits.size() == channel.coalition_size(),
            "channel size must equal the active coalition size");
    std::size_t ones = 0;
    for (auto b : colluder_bits) ones += b;
    return pirate_output(channel, ones, rng);
}

}  // namespace tracelab
