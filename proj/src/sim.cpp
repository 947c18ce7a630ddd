#include "tracelab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "tracelab/rng.hpp"

namespace tracelab {

void ExperimentConfig::validate() const {
    require(trials >= 1, "trials must be >= 1");
    require(c >= 1, "coalition size c must be >= 1");
    require(c <= c0, "coalition size c must not exceed decoder bound c0");
    require(c0 <= n, "decoder bound c0 must not exceed user count n");
    require(eps1 > 0.0 && eps1 < 1.0, "eps1 must satisfy 0 < eps1 < 1");
    require(eps2 >= 0.0 && eps2 < 1.0, "eps2 must satisfy 0 <= eps2 < 1");
    bias.validate();
    if (!activation_schedule.empty()) {
        require(activation_schedule.size() == c, "activation schedule needs one start segment per colluder");
        require(std::all_of(activation_schedule.begin(), activation_schedule.end(),
                            [](std::size_t s) { return s >= 1; }),
                "activation segments are 1-based");
    }
    if (scheme == Scheme::non_adaptive || scheme == Scheme::sequential_tardos) {
        require(length.has_value() && eta_final.has_value(),
                "sequential_tardos and non_adaptive schemes require length and eta_final");
    }
    if (scheme == Scheme::truncated_sprt) require(length.has_value(), "truncated_sprt requires length");
    if (length) require(*length >= 1, "length must be >= 1");
}

std::vector<std::string> preset_names() {
    return {"wald_interleaving_toy", "tardos_interleaving_toy", "wald_grouptesting_toy",
            "tardos_grouptesting_toy", "sprt_error_sum"};
}

ExperimentConfig preset(std::string_view name) {
    ExperimentConfig cfg;
    cfg.name = std::string(name);
    cfg.n = 1000;
    cfg.c = 10;
    cfg.c0 = 10;
    cfg.eps1 = 1e-3;
    cfg.eps2 = 0.0;
    cfg.master_seed = 42;
    if (name == "wald_interleaving_toy") {
        cfg.trials = 200;
        return cfg;
    }
    if (name == "tardos_interleaving_toy") {
        cfg.scheme = Scheme::sequential_tardos;
        cfg.length = 17953;
        cfg.eta_final = 6.9078;
        cfg.trials = 100;
        return cfg;
    }
    const double gt_bias = std::numbers::ln2 / 10.0;
    if (name == "wald_grouptesting_toy") {
        cfg.attack = AttackKind::all_one;
        cfg.decoder = DecoderKind::all_one;
        cfg.bias = BiasDistribution::fixed(gt_bias);
        cfg.trials = 200;
        return cfg;
    }
    if (name == "tardos_grouptesting_toy") {
        cfg.attack = AttackKind::all_one;
        cfg.decoder = DecoderKind::all_one;
        cfg.bias = BiasDistribution::fixed(gt_bias);
        cfg.scheme = Scheme::sequential_tardos;
        cfg.length = 459;
        cfg.eta_final = 6.91;
        cfg.trials = 200;
        return cfg;
    }
    if (name == "sprt_error_sum") {
        cfg.c = 5;
        cfg.c0 = 5;
        cfg.eps1 = 0.05;
        cfg.eps2 = 0.05;
        cfg.per_user_epsilons = true;
        cfg.variant = WaldVariant::aggressive;
        cfg.trials = 10000;
        return cfg;
    }
    throw PreconditionError("unknown preset '" + std::string(name) + "'");
}

namespace {

EngineConfig build_engine(const ExperimentConfig& cfg, const SegmentMoments& drift) {
    EngineConfig engine;
    engine.scheme = cfg.scheme;
    engine.delay = cfg.delay_B;
    engine.tainting = cfg.tainting;
    const ErrorPair eps = cfg.per_user_epsilons ? ErrorPair{cfg.eps1, cfg.eps2}
                                                : per_user_epsilons(cfg.eps1, cfg.eps2, cfg.n, cfg.c0);
    switch (cfg.scheme) {
        case Scheme::wald_sprt:
            engine.boundary = wald_thresholds(eps.eps1, eps.eps2, cfg.variant);
            break;
        case Scheme::truncated_sprt:
            engine.boundary = wald_thresholds(eps.eps1, eps.eps2, cfg.variant);
            engine.boundary.truncation =
                Truncation{*cfg.length, cfg.eta_final.value_or(engine.boundary.upper->intercept)};
            break;
        case Scheme::sequential_tardos: {
            double slope = cfg.slope.value_or(drift.innocent_drift());
            require(!(cfg.normalize && !cfg.slope), "normalized sequential_tardos needs an explicit slope");
            engine.boundary = tardos_boundary(*cfg.length, *cfg.eta_final, slope);
            break;
        }
        case Scheme::non_adaptive:
            engine.boundary.truncation = Truncation{*cfg.length, *cfg.eta_final};
            break;
    }
    engine.validate();
    return engine;
}

std::size_t derive_cap(const ExperimentConfig& cfg, const EngineConfig& engine, const SegmentMoments& drift) {
    if (cfg.max_segments > 0) {
        return engine.boundary.truncation ? std::min(cfg.max_segments, engine.boundary.truncation->length)
                                          : cfg.max_segments;
    }
    if (engine.boundary.truncation) return engine.boundary.truncation->length;
    constexpr std::size_t fallback = 1'000'000;
    const double eta = engine.boundary.upper->intercept;
    if (!(drift.mu1 > 0.0) || !(eta > 0.0)) return fallback;
    const double predicted = eta / drift.mu1;
    return static_cast<std::size_t>(std::ceil(10.0 * std::max(predicted, 1.0)));
}

std::vector<std::size_t> choose_coalition(std::size_t n, std::size_t c, std::uint64_t key) {
    // Partial Fisher-Yates with a counter-based stream.
    std::vector<std::size_t> users(n);
    for (std::size_t j = 0; j < n; ++j) users[j] = j;
    CounterRng rng(key);
    for (std::size_t k = 0; k < c; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.index(n - k));
        std::swap(users[k], users[pick]);
    }
    users.resize(c);
    std::sort(users.begin(), users.end());
    return users;
}

double percentile_nearest_rank(std::vector<double> sorted, double q) {
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

PreparedExperiment::PreparedExperiment(ExperimentConfig config)
    : config_(std::move(config)), decoder_(ScoreFunction::symmetric()) {
    config_.validate();
    decoder_ = ScoreFunction::make(config_.decoder, config_.c0, config_.attack);
    drift_ = averaged_moments(decoder_, make_attack(config_.attack, config_.c), config_.bias);
    engine_ = build_engine(config_, drift_);
    cap_ = derive_cap(config_, engine_, drift_);
}

std::array<Score, 2> PreparedExperiment::score_table(int y, double p) const {
    std::array<Score, 2> table = decoder_.table(y, p);
    if (!config_.normalize) return table;
    const SegmentMoments m = conditional_innocent_moments(decoder_, y, p);
    for (Score& s : table) {
        if (s.is_certainly_innocent()) continue;
        s = m.sigma0 > 0.0 ? Score(normalize_score(s.value(), m)) : Score(0.0);
    }
    return table;
}

TrialResult run_trial(const PreparedExperiment& prepared, std::size_t trial_index, const TrialHooks& hooks) {
    const ExperimentConfig& cfg = prepared.config();
    const std::uint64_t seed = cfg.master_seed;
    const std::uint64_t bias_key = derive_key(seed, trial_index, Stream::bias);
    const std::uint64_t code_key = derive_key(seed, trial_index, Stream::code);
    const std::uint64_t pirate_key = derive_key(seed, trial_index, Stream::pirate);

    TrialResult result;
    result.trial = trial_index;
    result.coalition = choose_coalition(cfg.n, cfg.c, derive_key(seed, trial_index, Stream::coalition));
    result.per_colluder_catch_times.assign(cfg.c, std::nullopt);

    std::vector<int> colluder_slot(cfg.n, -1);
    for (std::size_t k = 0; k < cfg.c; ++k) colluder_slot[result.coalition[k]] = static_cast<int>(k);

    auto bit = [&](std::size_t user, std::size_t segment, double p) {
        const auto& o = hooks.code_override;
        if (o && o->user == user && segment >= o->from_segment) return code_bit(mix(code_key, o->salt), user, segment, p);
        return code_bit(code_key, user, segment, p);
    };

    AccusationEngine engine(prepared.engine(), cfg.n);
    const auto& states = engine.states();
    std::vector<std::optional<CollusionChannel>> channels(cfg.c + 1);
    std::vector<Score> scores(cfg.n);
    std::size_t caught = 0;

    auto connected = [&](std::size_t k, std::size_t segment) {
        const UserState& st = states[result.coalition[k]];
        if (st.status != UserStatus::accused) return true;
        return st.disconnect_pending_until && segment <= *st.disconnect_pending_until;
    };

    const std::size_t cap = prepared.segment_cap();
    std::size_t segment = 1;
    for (; segment <= cap; ++segment) {
        const double p = bias_at(cfg.bias, bias_key, segment);

        std::size_t contributors = 0;
        std::size_t ones = 0;
        for (std::size_t k = 0; k < cfg.c; ++k) {
            const bool awake = cfg.activation_schedule.empty() || cfg.activation_schedule[k] <= segment;
            if (awake && connected(k, segment)) {
                ++contributors;
                ones += static_cast<std::size_t>(bit(result.coalition[k], segment, p));
            }
        }
        if (contributors == 0) {
            // Only sleepers remain: they wake up rather than leave the stream empty.
            for (std::size_t k = 0; k < cfg.c; ++k) {
                if (connected(k, segment)) {
                    ++contributors;
                    ones += static_cast<std::size_t>(bit(result.coalition[k], segment, p));
                }
            }
        }
        require(contributors > 0, "empty coalition: all colluders are disconnected");
        auto& channel = channels[contributors];
        if (!channel) channel = make_attack(cfg.attack, contributors);
        CounterRng pirate_rng(pirate_key, segment);
        const int y = pirate_output(*channel, ones, pirate_rng);
        if (hooks.on_segment) hooks.on_segment(segment, p, y, contributors);

        const auto table = prepared.score_table(y, p);
        for (std::size_t j = 0; j < cfg.n; ++j) {
            if (states[j].active()) scores[j] = table[static_cast<std::size_t>(bit(j, segment, p))];
        }

        for (const DecisionEvent& ev : engine.step(scores, segment)) {
            const int slot = colluder_slot[ev.user];
            if (slot >= 0) {
                if (ev.accuses()) {
                    result.per_colluder_catch_times[static_cast<std::size_t>(slot)] = ev.segment;
                    ++caught;
                } else {
                    ++result.false_negative_count;
                }
            } else if (ev.accuses()) {
                ++result.false_positive_count;
            }
            result.events.push_back(ev);
        }
        result.segments_generated = segment;
        if (engine.finished() || caught == cfg.c) break;
    }

    if (caught == cfg.c) {
        std::size_t last = 0;
        for (const auto& t : result.per_colluder_catch_times) last = std::max(last, *t);
        result.catch_all_time = last;
    }
    result.cap_hit = !engine.finished() && caught < cfg.c && result.segments_generated == cap;
    result.overshoots = engine.overshoots();
    return result;
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index) {
    return run_trial(PreparedExperiment(config), trial_index);
}

AggregateStats aggregate(std::span<const TrialResult> results, const ExperimentConfig& config) {
    AggregateStats s;
    s.trials = results.size();
    if (results.empty()) return s;
    std::vector<double> times;
    std::size_t fp_trials = 0;
    std::size_t fn_trials = 0;
    double overshoot_sum = 0.0;
    std::size_t overshoot_count = 0;
    for (const TrialResult& r : results) {
        if (r.catch_all_time) times.push_back(static_cast<double>(*r.catch_all_time));
        if (r.cap_hit) ++s.cap_hits;
        if (r.false_positive_count > 0) ++fp_trials;
        if (r.false_negative_count > 0) ++fn_trials;
        s.false_positives += r.false_positive_count;
        s.false_negatives += r.false_negative_count;
        overshoot_sum += r.overshoots.sum();
        overshoot_count += r.overshoots.count();
    }
    s.completed = times.size();
    const double trials = static_cast<double>(s.trials);
    s.fp_rate = static_cast<double>(fp_trials) / trials;
    s.fn_rate = static_cast<double>(fn_trials) / trials;
    const double innocents = static_cast<double>(config.n - config.c);
    s.per_user_fp_rate = innocents > 0 ? static_cast<double>(s.false_positives) / (trials * innocents) : 0.0;
    s.per_colluder_fn_rate = static_cast<double>(s.false_negatives) / (trials * static_cast<double>(config.c));
    s.mean_overshoot = overshoot_count > 0 ? overshoot_sum / static_cast<double>(overshoot_count) : 0.0;
    if (times.empty()) {
        s.mean_catch_all = s.median_catch_all = s.p90_catch_all = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double t : times) sum += t;
    s.mean_catch_all = sum / static_cast<double>(times.size());
    std::sort(times.begin(), times.end());
    const std::size_t m = times.size();
    s.median_catch_all = m % 2 == 1 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
    s.p90_catch_all = percentile_nearest_rank(times, 0.9);
    return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t parallelism) {
    const PreparedExperiment prepared(config);
    ExperimentResult out;
    out.config = config;
    out.trials.resize(config.trials);

    const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, config.trials);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t t = next++; t < config.trials; t = next++) out.trials[t] = run_trial(prepared, t);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    out.stats = aggregate(out.trials, config);
    return out;
}

SingleUserOutcome run_single_user(const PreparedExperiment& prepared, Hypothesis hypothesis, std::size_t trials) {
    require(trials >= 1, "trials must be >= 1");
    const ExperimentConfig& cfg = prepared.config();
    const CollusionChannel channel = make_attack(cfg.attack, cfg.c);
    const std::size_t cap = prepared.segment_cap();
    const std::uint64_t tag = hypothesis == Hypothesis::guilty ? 1 : 0;

    SingleUserOutcome out;
    out.trials = trials;
    double time_sum = 0.0;
    std::size_t decided = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t key = mix(derive_key(cfg.master_seed, t, Stream::single_user), tag);
        AccusationEngine engine(prepared.engine(), 1);
        std::vector<DecisionEvent> events;
        for (std::size_t i = 1; i <= cap && events.empty(); ++i) {
            const double p = bias_from_uniform(cfg.bias, to_open_unit(mix(key, i, 0)));
            const int x = to_open_unit(mix(key, i, 1)) < p ? 1 : 0;
            // Coalition symbols: slot 0 is the tracked user when guilty.
            std::size_t ones = hypothesis == Hypothesis::guilty ? static_cast<std::size_t>(x) : 0;
            const std::size_t first_other = hypothesis == Hypothesis::guilty ? 1 : 0;
            for (std::size_t k = first_other; k < cfg.c; ++k) {
                ones += to_open_unit(mix(key, i, k + 2)) < p ? 1 : 0;
            }
            const int y = to_open_unit(mix(key, i, cfg.c + 2)) < channel.theta(ones) ? 1 : 0;
            const Score s = prepared.score_table(y, p)[static_cast<std::size_t>(x)];
            events = engine.step(std::span<const Score>(&s, 1), i);
            if (engine.finished() && events.empty()) break;
        }
        if (events.empty()) {
            ++out.undecided;
            continue;
        }
        ++decided;
        time_sum += static_cast<double>(events.front().segment);
        if (events.front().accuses()) {
            ++out.accused;
        } else {
            ++out.acquitted;
        }
    }
    out.mean_decision_time = decided > 0 ? time_sum / static_cast<double>(decided) : 0.0;
    return out;
}

}  // namespace tracelab
