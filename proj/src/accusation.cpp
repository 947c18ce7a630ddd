#include "tracelab/accusation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tracelab {

void Boundary::validate() const {
    if (truncation) require(truncation->length >= 1, "truncation length must be >= 1");
    if (upper && lower) {
        // Affine lines: checking the ends of the range is enough.
        const std::size_t last = truncation ? truncation->length : 1;
        for (std::size_t i : {std::size_t{0}, last}) {
            require(lower->at(i) < upper->at(i), "lower boundary must lie strictly below the upper boundary");
        }
        if (!truncation) require(lower->slope <= upper->slope, "untruncated boundaries must not cross");
    }
}

std::string_view to_string(WaldVariant variant) noexcept {
    switch (variant) {
        case WaldVariant::aggressive: return "aggressive";
        case WaldVariant::conservative: return "conservative";
        case WaldVariant::upper_only: return "upper-only";
    }
    return "unknown";
}

WaldVariant parse_variant(std::string_view name) {
    if (name == "aggressive") return WaldVariant::aggressive;
    if (name == "conservative") return WaldVariant::conservative;
    if (name == "upper-only" || name == "upper_only") return WaldVariant::upper_only;
    throw PreconditionError("unknown threshold variant '" + std::string(name) +
                            "' (expected aggressive, conservative or upper-only)");
}

Boundary wald_thresholds(double eps1, double eps2, WaldVariant variant) {
    require(eps1 > 0.0 && eps1 < 1.0, "eps1 must satisfy 0 < eps1 < 1");
    require(eps2 >= 0.0 && eps2 < 1.0, "eps2 must satisfy 0 <= eps2 < 1");
    Boundary b;
    switch (variant) {
        case WaldVariant::aggressive:
            require(eps2 > 0.0, "eps2 = 0 requires the upper-only variant");
            b.lower = AffineLine{std::log(eps2 / (1.0 - eps1)), 0.0};
            b.upper = AffineLine{std::log((1.0 - eps2) / eps1), 0.0};
            break;
        case WaldVariant::conservative:
            require(eps2 > 0.0, "eps2 = 0 requires the upper-only variant");
            b.lower = AffineLine{-std::log(1.0 / eps2), 0.0};
            b.upper = AffineLine{std::log(1.0 / eps1), 0.0};
            break;
        case WaldVariant::upper_only:
            b.upper = AffineLine{std::log(1.0 / eps1), 0.0};
            break;
    }
    b.validate();
    return b;
}

ErrorPair per_user_epsilons(double eps1, double eps2, std::size_t n, std::size_t c) {
    require(n >= 1 && c >= 1, "per-user epsilons require n >= 1 and c >= 1");
    require(eps1 > 0.0 && eps1 < 1.0, "eps1 must satisfy 0 < eps1 < 1");
    require(eps2 >= 0.0 && eps2 < 1.0, "eps2 must satisfy 0 <= eps2 < 1");
    return {eps1 / static_cast<double>(n), eps2 / static_cast<double>(c)};
}

Boundary tardos_boundary(std::size_t length, double eta_final, double slope) {
    require(length >= 1, "code length must be >= 1");
    require(!std::isnan(slope) && !std::isnan(eta_final), "boundary parameters must not be NaN");
    require(slope < 0.0, "sequential boundary slope must be negative (the innocent drift)");
    Boundary b;
    b.truncation = Truncation{length, eta_final};
    if (std::isfinite(slope)) {
        b.upper = AffineLine{eta_final - slope * static_cast<double>(length), slope};
    }
    return b;
}

ErrorPair halve_epsilons(double eps1, double eps2) {
    require(eps1 > 0.0 && eps1 < 1.0 && eps2 > 0.0 && eps2 < 1.0, "epsilons must lie in (0,1)");
    return {eps1 / 2.0, eps2 / 2.0};
}

ErrorPair sequential_tardos_error_bounds(double eps1, double eps2) {
    require(eps1 > 0.0 && eps1 < 0.5 && eps2 > 0.0 && eps2 < 0.5, "epsilons must lie in (0,1/2)");
    return {2.0 * eps1, 2.0 * eps2};
}

std::string_view to_string(Scheme scheme) noexcept {
    switch (scheme) {
        case Scheme::non_adaptive: return "non_adaptive";
        case Scheme::sequential_tardos: return "sequential_tardos";
        case Scheme::wald_sprt: return "wald_sprt";
        case Scheme::truncated_sprt: return "truncated_sprt";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    for (auto s : {Scheme::non_adaptive, Scheme::sequential_tardos, Scheme::wald_sprt, Scheme::truncated_sprt}) {
        if (name == to_string(s)) return s;
    }
    throw PreconditionError("unknown scheme '" + std::string(name) +
                            "' (expected non_adaptive, sequential_tardos, wald_sprt or truncated_sprt)");
}

void EngineConfig::validate() const {
    boundary.validate();
    switch (scheme) {
        case Scheme::non_adaptive:
            require(boundary.truncation.has_value(), "non_adaptive scheme requires a truncation point");
            require(!boundary.lower.has_value(), "non_adaptive scheme must not have a lower boundary");
            break;
        case Scheme::sequential_tardos:
            require(boundary.truncation.has_value(), "sequential_tardos scheme requires a truncation point");
            break;
        case Scheme::wald_sprt:
            require(boundary.upper.has_value(), "wald_sprt scheme requires an upper boundary");
            break;
        case Scheme::truncated_sprt:
            require(boundary.upper.has_value(), "truncated_sprt scheme requires an upper boundary");
            require(boundary.truncation.has_value(), "truncated_sprt scheme requires a truncation point");
            break;
    }
}

std::string_view to_string(DecisionKind kind) noexcept {
    switch (kind) {
        case DecisionKind::accused: return "accused";
        case DecisionKind::acquitted: return "acquitted";
        case DecisionKind::certainly_innocent: return "certainly_innocent";
        case DecisionKind::forced_at_truncation: return "forced_at_truncation";
    }
    return "unknown";
}

std::string_view DecisionEvent::label() const noexcept {
    if (kind == DecisionKind::forced_at_truncation) return guilty_verdict ? "forced_accused" : "forced_acquitted";
    return to_string(kind);
}

AccusationEngine::AccusationEngine(EngineConfig config, std::size_t users)
    : config_(std::move(config)), states_(users), active_(users) {
    require(users >= 1, "engine needs at least one user");
    config_.validate();
}

bool AccusationEngine::is_tainted(std::size_t segment) const noexcept {
    return config_.tainting && segment <= taint_until_;
}

void AccusationEngine::decide(std::size_t user, DecisionKind kind, bool verdict, double overshoot,
                              std::size_t segment, std::vector<DecisionEvent>& out) {
    UserState& st = states_[user];
    const bool accuses = kind == DecisionKind::accused || (kind == DecisionKind::forced_at_truncation && verdict);
    UserStatus status = UserStatus::acquitted;
    if (accuses) status = UserStatus::accused;
    if (kind == DecisionKind::certainly_innocent) status = UserStatus::certainly_innocent;
    st.settle(status, segment);
    if (accuses) {
        st.disconnect_pending_until = segment + config_.delay;
        if (config_.tainting) taint_until_ = std::max(taint_until_, segment + config_.delay);
    }
    if (kind == DecisionKind::accused || kind == DecisionKind::acquitted) overshoots_.add(overshoot);
    --active_;
    out.push_back(DecisionEvent{user, segment, kind, accuses, overshoot});
}

std::vector<DecisionEvent> AccusationEngine::step(std::span<const Score> scores, std::size_t segment) {
    if (finished_) throw std::logic_error("engine already finished: no segments may be added");
    if (segment != last_segment_ + 1) {
        throw std::logic_error("segment index out of order: expected " + std::to_string(last_segment_ + 1) +
                               ", got " + std::to_string(segment));
    }
    require(scores.size() == states_.size(), "one score per user is required");
    const auto& b = config_.boundary;
    if (b.truncation) require(segment <= b.truncation->length, "segment beyond truncation length");
    last_segment_ = segment;

    std::vector<DecisionEvent> events;
    const bool tainted = is_tainted(segment);
    const bool intermediate = config_.scheme != Scheme::non_adaptive;
    const bool has_upper = b.upper.has_value();
    const bool has_lower = b.lower.has_value();
    const double upper = has_upper ? b.upper->at(segment) : 0.0;
    const double lower = has_lower ? b.lower->at(segment) : 0.0;

    for (std::size_t j = 0; j < states_.size(); ++j) {
        UserState& st = states_[j];
        if (!st.active()) continue;
        if (!tainted) {
            if (scores[j].is_certainly_innocent()) {
                decide(j, DecisionKind::certainly_innocent, false, 0.0, segment, events);
                continue;
            }
            st.cumulative_score += scores[j].value();
        }
        if (!intermediate) continue;
        if (has_upper && st.cumulative_score > upper) {
            decide(j, DecisionKind::accused, true, st.cumulative_score - upper, segment, events);
        } else if (has_lower && st.cumulative_score < lower) {
            decide(j, DecisionKind::acquitted, false, lower - st.cumulative_score, segment, events);
        }
    }

    if (b.truncation && segment == b.truncation->length) {
        const double eta = b.truncation->eta_final;
        for (std::size_t j = 0; j < states_.size(); ++j) {
            if (!states_[j].active()) continue;
            const double s = states_[j].cumulative_score;
            decide(j, DecisionKind::forced_at_truncation, s >= eta, s >= eta ? s - eta : 0.0, segment, events);
        }
        finished_ = true;
    }
    if (active_ == 0) finished_ = true;
    return events;
}

}  // namespace tracelab
