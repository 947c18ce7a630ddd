#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tracelab/channel.hpp"
#include "tracelab/encoder.hpp"

namespace tracelab {

/// A per-segment score: either a finite log-score in nats or the
/// certainly-innocent signal (a -infinity score). The signal never enters
/// arithmetic; engines turn it into a terminal status.
class Score {
public:
    constexpr Score() = default;
    constexpr explicit Score(double nats) : value_(nats) {}

    static constexpr Score certainly_innocent() {
        Score s;
        s.certain_ = true;
        return s;
    }

    constexpr bool is_certainly_innocent() const noexcept { return certain_; }
    /// Finite value; 0 for the certainly-innocent signal.
    constexpr double value() const noexcept { return value_; }

    friend constexpr bool operator==(const Score&, const Score&) = default;

private:
    double value_ = 0.0;
    bool certain_ = false;
};

enum class DecoderKind { symmetric, interleaving_ll, all_one, generic_np };

std::string_view to_string(DecoderKind kind) noexcept;
DecoderKind parse_decoder(std::string_view name);

double symmetric_score(int x, int y, double p);
double interleaving_ll_score(int x, int y, double p, std::size_t c0);
Score all_one_score(int x, int y, std::size_t c0);
/// Log-likelihood ratio of guilty vs innocent for an arbitrary symmetric channel.
Score generic_np_score(int x, int y, double p, const CollusionChannel& channel);

/// f(x, y | p) for a user in the coalition of `channel`.
double guilty_joint_prob(int x, int y, double p, const CollusionChannel& channel);
/// f(x, y | p) for a user outside the coalition: P(x | p) P(y | p).
double innocent_joint_prob(int x, int y, double p, const CollusionChannel& channel);

/// A decoder g(x, y, p) built for assumed coalition size c0.
class ScoreFunction {
public:
    static ScoreFunction symmetric();
    static ScoreFunction interleaving_ll(std::size_t c0);
    static ScoreFunction all_one(std::size_t c0);
    static ScoreFunction generic_np(CollusionChannel assumed);
    /// Decoder of `kind` at c0; generic_np is matched to `attack` at c0.
    static ScoreFunction make(DecoderKind kind, std::size_t c0, AttackKind attack);

    DecoderKind kind() const noexcept { return kind_; }
    std::size_t c0() const noexcept { return c0_; }

    Score operator()(int x, int y, double p) const;

    /// Scores for x = 0 and x = 1 given (y, p).
    std::array<Score, 2> table(int y, double p) const;

private:
    ScoreFunction(DecoderKind kind, std::size_t c0, std::optional<CollusionChannel> channel);

    DecoderKind kind_;
    std::size_t c0_;
    std::optional<CollusionChannel> channel_;
};

/// Per-segment score moments in nats. mu0/sigma0 describe the finite part of
/// the innocent score; innocent_certain_mass is the probability of the
/// certainly-innocent signal under H0 (likewise for the guilty fields).
struct SegmentMoments {
    double mu0 = 0.0;
    double sigma0 = 0.0;
    double mu1 = 0.0;
    double sigma1 = 0.0;
    double innocent_certain_mass = 0.0;
    double guilty_certain_mass = 0.0;

    /// Innocent drift including the point mass: -infinity if it is positive.
    double innocent_drift() const noexcept;
};

/// Exact moments at bias p by enumerating (x, y). `channel` is the true
/// attack; the decoder may assume a different coalition size.
SegmentMoments segment_moments(const ScoreFunction& score, const CollusionChannel& channel, double p);

/// Moments averaged over P ~ dist (quadrature on the first and second moments).
SegmentMoments averaged_moments(const ScoreFunction& score, const CollusionChannel& channel,
                                const BiasDistribution& dist);

/// Innocent moments conditional on the observed pirate symbol y. These only
/// need (y, p), so they are available to a tracer that does not know the attack.
SegmentMoments conditional_innocent_moments(const ScoreFunction& score, int y, double p);

/// (s - mu0) / sigma0. Throws if sigma0 == 0.
double normalize_score(double raw, const SegmentMoments& moments);

/// Per-segment normalization; a segment with sigma0 == 0 carries no
/// information and contributes 0.
std::vector<double> normalize_scores(std::span<const double> raw, std::span<const SegmentMoments> moments);

}  // namespace tracelab
