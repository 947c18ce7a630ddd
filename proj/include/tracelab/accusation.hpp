#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tracelab/model.hpp"
#include "tracelab/scoring.hpp"

namespace tracelab {

/// intercept + slope * i0, in nats.
struct AffineLine {
    double intercept = 0.0;
    double slope = 0.0;

    double at(std::size_t segment) const noexcept { return intercept + slope * static_cast<double>(segment); }
};

struct Truncation {
    std::size_t length = 0;  // final segment at which every undecided user is decided
    double eta_final = 0.0;  // accuse iff score >= eta_final there
};

/// Stopping boundary in the (segment, cumulative score) plane. An absent
/// upper line with a truncation is the vertical boundary at `length`.
struct Boundary {
    std::optional<AffineLine> upper;
    std::optional<AffineLine> lower;
    std::optional<Truncation> truncation;

    void validate() const;
};

enum class WaldVariant { aggressive, conservative, upper_only };

std::string_view to_string(WaldVariant variant) noexcept;
WaldVariant parse_variant(std::string_view name);

/// Horizontal SPRT thresholds for per-user error probabilities.
Boundary wald_thresholds(double eps1, double eps2, WaldVariant variant);

struct ErrorPair {
    double eps1 = 0.0;  // false positive
    double eps2 = 0.0;  // false negative

    friend bool operator==(const ErrorPair&, const ErrorPair&) = default;
};

/// Global (eps1, eps2) to per-user (eps1 / n, eps2 / c) via union bounds.
ErrorPair per_user_epsilons(double eps1, double eps2, std::size_t n, std::size_t c);

/// Sloped accusation line ending at (length, eta_final). slope = -infinity
/// gives the vertical boundary: only the decision at `length` remains.
Boundary tardos_boundary(std::size_t length, double eta_final, double slope);

/// Non-adaptive parameters to use so that the sequential scheme built on
/// them meets (eps1, eps2).
ErrorPair halve_epsilons(double eps1, double eps2);

/// Error bounds (2 eps1, 2 eps2) of the sequential Tardos scheme built from
/// non-adaptive parameters (eps1, eps2).
ErrorPair sequential_tardos_error_bounds(double eps1, double eps2);

enum class Scheme { non_adaptive, sequential_tardos, wald_sprt, truncated_sprt };

std::string_view to_string(Scheme scheme) noexcept;
Scheme parse_scheme(std::string_view name);

struct EngineConfig {
    Boundary boundary;
    std::size_t delay = 0;  // B: segments between accusation and disconnection
    bool tainting = false;  // zero everyone's scores on the B segments after an accusation
    Scheme scheme = Scheme::wald_sprt;

    void validate() const;
};

enum class DecisionKind { accused, acquitted, certainly_innocent, forced_at_truncation };

std::string_view to_string(DecisionKind kind) noexcept;

struct DecisionEvent {
    std::size_t user = 0;
    std::size_t segment = 0;
    DecisionKind kind = DecisionKind::accused;
    bool guilty_verdict = false;  // meaningful for forced_at_truncation
    double overshoot = 0.0;       // distance past the crossed boundary, nats

    bool accuses() const noexcept {
        return kind == DecisionKind::accused || (kind == DecisionKind::forced_at_truncation && guilty_verdict);
    }

    /// CSV token: accused, acquitted, certainly_innocent, forced_accused or forced_acquitted.
    std::string_view label() const noexcept;

    friend bool operator==(const DecisionEvent&, const DecisionEvent&) = default;
};

/// Per-trial stopping-rule state for n users. Cumulative scores are compared
/// raw against the boundary: strictly during the run, inclusively at truncation.
class AccusationEngine {
public:
    AccusationEngine(EngineConfig config, std::size_t users);

    /// Adds one segment of scores (one per user; entries of decided users are
    /// ignored) and returns the decisions taken at `segment`. Segments must be
    /// fed in order 1, 2, 3, ...
    std::vector<DecisionEvent> step(std::span<const Score> scores, std::size_t segment);

    bool finished() const noexcept { return finished_; }
    std::size_t last_segment() const noexcept { return last_segment_; }
    std::size_t active_count() const noexcept { return active_; }
    bool is_tainted(std::size_t segment) const noexcept;

    const EngineConfig& config() const noexcept { return config_; }
    const std::vector<UserState>& states() const noexcept { return states_; }
    const OvershootStats& overshoots() const noexcept { return overshoots_; }

private:
    void decide(std::size_t user, DecisionKind kind, bool verdict, double overshoot, std::size_t segment,
                std::vector<DecisionEvent>& out);

    EngineConfig config_;
    std::vector<UserState> states_;
    OvershootStats overshoots_;
    std::size_t last_segment_ = 0;
    std::size_t taint_until_ = 0;
    std::size_t active_ = 0;
    bool finished_ = false;
};

}  // namespace tracelab
