#include "tracelab/scoring.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "tracelab/model.hpp"
#include "tracelab/quadrature.hpp"

namespace tracelab {

namespace {

void require_bit(int b) { require(b == 0 || b == 1, "symbols must be 0 or 1"); }

void require_open_bias(double p) { require(p > 0.0 && p < 1.0, "bias p must lie strictly in (0,1)"); }

double bernoulli(int x, double p) { return x == 1 ? p : 1.0 - p; }

// Output probabilities at one bias from a single set of binomial weights over
// the other c-1 colluders. y = 0 entries are summed directly rather than
// taken as 1 - P(Y = 1), which would cancel badly near 0.
struct OutputTable {
    double member[2][2] = {};  // P(Y = y | p, X_1 = x) for a coalition member
    double marginal[2] = {};   // P(Y = y | p)

    OutputTable(const CollusionChannel& channel, double p) {
        const std::size_t others = channel.coalition_size() - 1;
        for (std::size_t z = 0; z <= others; ++z) {
            const double w = binomial_pmf(others, z, p);
            for (int x = 0; x <= 1; ++x) {
                const double t = channel.theta(z + static_cast<std::size_t>(x));
                member[x][1] += w * t;
                member[x][0] += w * (1.0 - t);
            }
        }
        for (int y = 0; y <= 1; ++y) marginal[y] = p * member[1][y] + (1.0 - p) * member[0][y];
    }
};

// Unnormalized moment sums over the finite part of a score distribution.
struct MomentSums {
    double mass = 0.0;    // certainly-innocent probability
    double first = 0.0;   // sum f * g over finite outcomes
    double second = 0.0;  // sum f * g^2 over finite outcomes

    void add(double prob, const Score& s) {
        if (prob <= 0.0) return;
        if (s.is_certainly_innocent()) {
            mass += prob;
        } else {
            first += prob * s.value();
            second += prob * s.value() * s.value();
        }
    }
};

void finish(const MomentSums& sums, double& mu, double& sigma, double& mass) {
    mass = sums.mass;
    const double finite = 1.0 - sums.mass;
    if (finite <= 0.0) {
        mu = 0.0;
        sigma = 0.0;
        return;
    }
    mu = sums.first / finite;
    const double var = sums.second / finite - mu * mu;
    sigma = var > 0.0 ? std::sqrt(var) : 0.0;
}

struct PairSums {
    MomentSums innocent;
    MomentSums guilty;
};

PairSums pair_sums(const ScoreFunction& score, const CollusionChannel& channel, double p) {
    const OutputTable table(channel, p);
    PairSums sums;
    for (int x = 0; x <= 1; ++x) {
        for (int y = 0; y <= 1; ++y) {
            const double f0 = bernoulli(x, p) * table.marginal[y];
            const double f1 = bernoulli(x, p) * table.member[x][y];
            if (f0 <= 0.0 && f1 <= 0.0) continue;
            const Score s = score(x, y, p);
            sums.innocent.add(f0, s);
            sums.guilty.add(f1, s);
        }
    }
    return sums;
}

}  // namespace

std::string_view to_string(DecoderKind kind) noexcept {
    switch (kind) {
        case DecoderKind::symmetric: return "symmetric";
        case DecoderKind::interleaving_ll: return "interleaving_ll";
        case DecoderKind::all_one: return "all_one";
        case DecoderKind::generic_np: return "generic_np";
    }
    return "unknown";
}

DecoderKind parse_decoder(std::string_view name) {
    for (auto kind : {DecoderKind::symmetric, DecoderKind::interleaving_ll, DecoderKind::all_one,
                      DecoderKind::generic_np}) {
        if (name == to_string(kind)) return kind;
    }
    throw PreconditionError("unknown decoder '" + std::string(name) +
                            "' (expected symmetric, interleaving_ll, all_one or generic_np)");
}

double symmetric_score(int x, int y, double p) {
    require_bit(x);
    require_bit(y);
    require_open_bias(p);
    const double magnitude = x == 1 ? std::sqrt((1.0 - p) / p) : std::sqrt(p / (1.0 - p));
    return x == y ? magnitude : -magnitude;
}

double interleaving_ll_score(int x, int y, double p, std::size_t c0) {
    require_bit(x);
    require_bit(y);
    require_open_bias(p);
    require(c0 >= 1, "decoder coalition size c0 must be >= 1");
    const double c = static_cast<double>(c0);
    if (x != y) return std::log1p(-1.0 / c);
    if (x == 1) return std::log1p((1.0 - p) / (c * p));
    return std::log1p(p / (c * (1.0 - p)));
}

Score all_one_score(int x, int y, std::size_t c0) {
    require_bit(x);
    require_bit(y);
    require(c0 >= 1, "decoder coalition size c0 must be >= 1");
    const double c = static_cast<double>(c0);
    if (x == 1 && y == 0) return Score::certainly_innocent();
    if (x == 1) return Score(std::numbers::ln2);
    if (y == 0) return Score(std::numbers::ln2 / c);
    return Score(std::log(2.0 - std::exp2(-1.0 / c)));
}

double guilty_joint_prob(int x, int y, double p, const CollusionChannel& channel) {
    require_bit(x);
    require_bit(y);
    require_open_bias(p);
    return bernoulli(x, p) * OutputTable(channel, p).member[x][y];
}

double innocent_joint_prob(int x, int y, double p, const CollusionChannel& channel) {
    require_bit(x);
    require_bit(y);
    require_open_bias(p);
    return bernoulli(x, p) * OutputTable(channel, p).marginal[y];
}

Score generic_np_score(int x, int y, double p, const CollusionChannel& channel) {
    require_bit(x);
    require_bit(y);
    require_open_bias(p);
    // P(x | p) is common to both hypotheses and cancels.
    const OutputTable table(channel, p);
    const double guilty = table.member[x][y];
    const double innocent = table.marginal[y];
    if (guilty <= 0.0) {
        require(innocent > 0.0, "likelihood ratio undefined: both hypotheses give probability 0");
        return Score::certainly_innocent();
    }
    return Score(std::log(guilty / innocent));
}

ScoreFunction::ScoreFunction(DecoderKind kind, std::size_t c0, std::optional<CollusionChannel> channel)
    : kind_(kind), c0_(c0), channel_(std::move(channel)) {
    require(c0_ >= 1, "decoder coalition size c0 must be >= 1");
}

ScoreFunction ScoreFunction::symmetric() { return ScoreFunction(DecoderKind::symmetric, 1, std::nullopt); }

ScoreFunction ScoreFunction::interleaving_ll(std::size_t c0) {
    return ScoreFunction(DecoderKind::interleaving_ll, c0, std::nullopt);
}

ScoreFunction ScoreFunction::all_one(std::size_t c0) {
    return ScoreFunction(DecoderKind::all_one, c0, std::nullopt);
}

ScoreFunction ScoreFunction::generic_np(CollusionChannel assumed) {
    const std::size_t c0 = assumed.coalition_size();
    return ScoreFunction(DecoderKind::generic_np, c0, std::move(assumed));
}

ScoreFunction ScoreFunction::make(DecoderKind kind, std::size_t c0, AttackKind attack) {
    switch (kind) {
        case DecoderKind::symmetric: return symmetric();
        case DecoderKind::interleaving_ll: return interleaving_ll(c0);
        case DecoderKind::all_one: return all_one(c0);
        case DecoderKind::generic_np: return generic_np(make_attack(attack, c0));
    }
    throw PreconditionError("unknown decoder kind");
}

Score ScoreFunction::operator()(int x, int y, double p) const {
    switch (kind_) {
        case DecoderKind::symmetric: return Score(symmetric_score(x, y, p));
        case DecoderKind::interleaving_ll: return Score(interleaving_ll_score(x, y, p, c0_));
        case DecoderKind::all_one: return all_one_score(x, y, c0_);
        case DecoderKind::generic_np: return generic_np_score(x, y, p, *channel_);
    }
    return Score::certainly_innocent();
}

std::array<Score, 2> ScoreFunction::table(int y, double p) const {
    return {(*this)(0, y, p), (*this)(1, y, p)};
}

double SegmentMoments::innocent_drift() const noexcept {
    return innocent_certain_mass > 0.0 ? -std::numeric_limits<double>::infinity() : mu0;
}

SegmentMoments segment_moments(const ScoreFunction& score, const CollusionChannel& channel, double p) {
    const PairSums sums = pair_sums(score, channel, p);
    SegmentMoments m;
    finish(sums.innocent, m.mu0, m.sigma0, m.innocent_certain_mass);
    finish(sums.guilty, m.mu1, m.sigma1, m.guilty_certain_mass);
    return m;
}

SegmentMoments averaged_moments(const ScoreFunction& score, const CollusionChannel& channel,
                                const BiasDistribution& dist) {
    // The six averages are separate scalar quadratures over largely the same
    // nodes, so per-bias sums are cached.
    std::map<double, PairSums> cache;
    auto sums_at = [&](double p) -> const PairSums& {
        auto it = cache.find(p);
        if (it == cache.end()) it = cache.emplace(p, pair_sums(score, channel, p)).first;
        return it->second;
    };
    auto average = [&](auto pick) { return expect_over_bias(dist, [&](double p) { return pick(sums_at(p)); }); };
    PairSums avg;
    avg.innocent.mass = average([](const PairSums& s) { return s.innocent.mass; });
    avg.innocent.first = average([](const PairSums& s) { return s.innocent.first; });
    avg.innocent.second = average([](const PairSums& s) { return s.innocent.second; });
    avg.guilty.mass = average([](const PairSums& s) { return s.guilty.mass; });
    avg.guilty.first = average([](const PairSums& s) { return s.guilty.first; });
    avg.guilty.second = average([](const PairSums& s) { return s.guilty.second; });
    SegmentMoments m;
    finish(avg.innocent, m.mu0, m.sigma0, m.innocent_certain_mass);
    finish(avg.guilty, m.mu1, m.sigma1, m.guilty_certain_mass);
    return m;
}

SegmentMoments conditional_innocent_moments(const ScoreFunction& score, int y, double p) {
    require_bit(y);
    require_open_bias(p);
    MomentSums sums;
    for (int x = 0; x <= 1; ++x) sums.add(bernoulli(x, p), score(x, y, p));
    SegmentMoments m;
    finish(sums, m.mu0, m.sigma0, m.innocent_certain_mass);
    return m;
}

double normalize_score(double raw, const SegmentMoments& moments) {
    require(moments.sigma0 > 0.0, "normalization requires sigma0 > 0 for the segment");
    return (raw - moments.mu0) / moments.sigma0;
}

std::vector<double> normalize_scores(std::span<const double> raw, std::span<const SegmentMoments> moments) {
    require(raw.size() == moments.size(), "one moment record per segment is required");
    std::vector<double> out(raw.size(), 0.0);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (moments[i].sigma0 > 0.0) out[i] = normalize_score(raw[i], moments[i]);
    }
    return out;
}

}  // namespace tracelab
