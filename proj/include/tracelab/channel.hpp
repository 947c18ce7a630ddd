#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tracelab/model.hpp"
#include "tracelab/rng.hpp"

namespace tracelab {

enum class AttackKind { interleaving, all_one, majority, minority, coin };

std::string_view to_string(AttackKind kind) noexcept;
AttackKind parse_attack(std::string_view name);

/// Colluder-symmetric attack: theta[z] = P(Y = 1 | coalition holds z ones).
/// Always satisfies the marking assumption theta[0] = 0, theta[c] = 1.
class CollusionChannel {
public:
    explicit CollusionChannel(std::vector<double> theta);

    std::size_t coalition_size() const noexcept { return theta_.size() - 1; }
    double theta(std::size_t ones) const { return theta_.at(ones); }
    std::span<const double> thetas() const noexcept { return theta_; }

private:
    std::vector<double> theta_;
};

CollusionChannel make_attack(AttackKind kind, std::size_t c);

/// C(n,k) p^k (1-p)^(n-k).
double binomial_pmf(std::size_t n, std::size_t k, double p);

/// P(Y = 1 | p) when all c colluders hold i.i.d. Bernoulli(p) symbols.
double marginal_output_prob(const CollusionChannel& channel, double p);

/// Pirate symbol from the symbols currently held by the active coalition.
/// Consumes exactly one draw from `rng`.
int pirate_output(const CollusionChannel& channel, std::span<const std::uint8_t> colluder_bits,
                  CounterRng& rng);

/// Same as above when only the count of ones is known.
int pirate_output(const CollusionChannel& channel, std::size_t ones, CounterRng& rng);

}  // namespace tracelab
