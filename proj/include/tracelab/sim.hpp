#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracelab/accusation.hpp"
#include "tracelab/channel.hpp"
#include "tracelab/encoder.hpp"
#include "tracelab/scoring.hpp"

namespace tracelab {

struct ExperimentConfig {
    std::string name = "custom";
    std::size_t n = 1000;
    std::size_t c = 10;
    std::size_t c0 = 10;
    double eps1 = 1e-3;  // global false positive target (per user if per_user_epsilons)
    double eps2 = 0.0;   // global false negative target (per user if per_user_epsilons)
    bool per_user_epsilons = false;
    AttackKind attack = AttackKind::interleaving;
    DecoderKind decoder = DecoderKind::interleaving_ll;
    bool normalize = false;  // center and scale scores by the innocent moments given (y, p)
    Scheme scheme = Scheme::wald_sprt;
    WaldVariant variant = WaldVariant::upper_only;
    std::optional<std::size_t> length;  // truncation point / code length
    std::optional<double> eta_final;    // decision threshold at `length`
    std::optional<double> slope;        // sequential Tardos slope; default: innocent drift
    BiasDistribution bias = BiasDistribution::arcsine();
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    std::size_t max_segments = 0;  // 0: derived from the expected catch time
    std::size_t delay_B = 0;
    bool tainting = false;
    /// First segment at which each colluder (in coalition order) contributes;
    /// empty means every colluder contributes from segment 1.
    std::vector<std::size_t> activation_schedule;

    void validate() const;
};

/// Names of the bundled experiment presets.
std::vector<std::string> preset_names();
ExperimentConfig preset(std::string_view name);

/// Decoder, boundary and segment cap resolved once per experiment.
class PreparedExperiment {
public:
    explicit PreparedExperiment(ExperimentConfig config);

    const ExperimentConfig& config() const noexcept { return config_; }
    const ScoreFunction& decoder() const noexcept { return decoder_; }
    const EngineConfig& engine() const noexcept { return engine_; }
    std::size_t segment_cap() const noexcept { return cap_; }
    /// Bias-averaged moments of the decoder against the full-size attack.
    const SegmentMoments& drift() const noexcept { return drift_; }

    /// Decoder scores for x = 0, 1 at (y, p), normalized if configured.
    std::array<Score, 2> score_table(int y, double p) const;

private:
    ExperimentConfig config_;
    ScoreFunction decoder_;
    SegmentMoments drift_;
    EngineConfig engine_;
    std::size_t cap_ = 0;
};

struct TrialResult {
    std::size_t trial = 0;
    std::vector<std::size_t> coalition;  // sorted user indices
    std::optional<std::size_t> catch_all_time;
    std::vector<std::optional<std::size_t>> per_colluder_catch_times;  // aligned with coalition
    std::size_t false_positive_count = 0;
    std::size_t false_negative_count = 0;
    OvershootStats overshoots;
    std::size_t segments_generated = 0;
    bool cap_hit = false;
    std::vector<DecisionEvent> events;

    friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

/// Replaces one user's codeword by an independent one from `from_segment` on.
struct CodeOverride {
    std::size_t user = 0;
    std::size_t from_segment = 1;
    std::uint64_t salt = 1;
};

struct TrialHooks {
    std::function<void(std::size_t segment, double p, int y, std::size_t contributors)> on_segment;
    std::optional<CodeOverride> code_override;
};

TrialResult run_trial(const PreparedExperiment& prepared, std::size_t trial_index, const TrialHooks& hooks = {});
TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index);

struct AggregateStats {
    std::size_t trials = 0;
    std::size_t completed = 0;  // trials in which every colluder was accused
    std::size_t cap_hits = 0;
    double mean_catch_all = 0.0;  // over completed trials; NaN if none
    double median_catch_all = 0.0;
    double p90_catch_all = 0.0;
    double fp_rate = 0.0;           // fraction of trials with >= 1 innocent accused
    double per_user_fp_rate = 0.0;  // innocent accusations / (trials * innocents)
    double fn_rate = 0.0;           // fraction of trials with >= 1 colluder acquitted
    double per_colluder_fn_rate = 0.0;
    double mean_overshoot = 0.0;    // pooled over all boundary crossings
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
};

/// Order-independent: depends only on the trial results in index order.
AggregateStats aggregate(std::span<const TrialResult> results, const ExperimentConfig& config);

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<TrialResult> trials;
    AggregateStats stats;
};

/// Runs config.trials trials on `parallelism` threads; the result does not
/// depend on `parallelism`.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t parallelism = 1);

enum class Hypothesis { innocent, guilty };

/// Outcomes of independent single-user sequential tests: each trial follows
/// one innocent user, or one colluder inside a full-size coalition that is
/// never disconnected.
struct SingleUserOutcome {
    std::size_t trials = 0;
    std::size_t accused = 0;
    std::size_t acquitted = 0;
    std::size_t undecided = 0;  // cap reached
    double mean_decision_time = 0.0;

    double accuse_rate() const { return static_cast<double>(accused) / static_cast<double>(trials); }
    double acquit_rate() const { return static_cast<double>(acquitted) / static_cast<double>(trials); }
};

SingleUserOutcome run_single_user(const PreparedExperiment& prepared, Hypothesis hypothesis, std::size_t trials);

}  // namespace tracelab
