#include "tracelab/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace tracelab {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_code_text(std::ostream& out, const BiasVector& bias, const CodeMatrix& code) {
    require(bias.length() == code.length(), "dimension mismatch: code length != bias length");
    out << code.length() << ' ' << code.users() << '\n';
    for (std::size_t i = 1; i <= code.length(); ++i) {
        out << format_double(bias.at(i));
        for (std::size_t j = 0; j < code.users(); ++j) out << ' ' << code.bit(j, i);
        out << '\n';
    }
}

std::pair<BiasVector, CodeMatrix> read_code_text(std::istream& in) {
    std::size_t length = 0;
    std::size_t users = 0;
    require(static_cast<bool>(in >> length >> users), "code text: malformed header, expected 'length n'");
    require(length >= 1 && users >= 1, "code text: length and n must be >= 1");
    std::vector<double> biases(length);
    std::vector<std::uint8_t> bits(users * length);
    for (std::size_t i = 0; i < length; ++i) {
        require(static_cast<bool>(in >> biases[i]), "code text: missing bias on segment line");
        for (std::size_t j = 0; j < users; ++j) {
            int b = -1;
            require(static_cast<bool>(in >> b) && (b == 0 || b == 1), "code text: expected a 0/1 symbol");
            bits[j * length + i] = static_cast<std::uint8_t>(b);
        }
    }
    return {BiasVector(std::move(biases)), CodeMatrix(users, length, std::move(bits))};
}

void write_events_csv(std::ostream& out, std::span<const TrialResult> results) {
    out << "trial,user,segment,kind,overshoot\n";
    for (const TrialResult& r : results) {
        for (const DecisionEvent& ev : r.events) {
            out << r.trial << ',' << ev.user << ',' << ev.segment << ',' << ev.label() << ','
                << format_double(ev.overshoot) << '\n';
        }
    }
}

void write_trials_csv(std::ostream& out, std::span<const TrialResult> results) {
    out << "trial,catch_all_time,false_positives,false_negatives,segments_generated,mean_overshoot\n";
    for (const TrialResult& r : results) {
        out << r.trial << ',';
        if (r.catch_all_time) {
            out << *r.catch_all_time;
        } else {
            out << "NA";
        }
        out << ',' << r.false_positive_count << ',' << r.false_negative_count << ',' << r.segments_generated << ','
            << format_double(r.overshoots.mean()) << '\n';
    }
}

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string bias_kind_name(BiasDistribution::Kind kind) {
    switch (kind) {
        case BiasDistribution::Kind::arcsine: return "arcsine";
        case BiasDistribution::Kind::arcsine_with_cutoff: return "arcsine_cutoff";
        case BiasDistribution::Kind::fixed: return "fixed";
    }
    return "unknown";
}

BiasDistribution bias_from_json(const nlohmann::json& j) {
    const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
    const double parameter = j.is_object() && j.contains("parameter") ? j.at("parameter").get<double>() : 0.0;
    BiasDistribution d;
    if (kind == "arcsine") {
        d = BiasDistribution::arcsine();
    } else if (kind == "arcsine_cutoff") {
        d = BiasDistribution::arcsine_with_cutoff(parameter);
    } else if (kind == "fixed") {
        d = BiasDistribution::fixed(parameter);
    } else {
        throw PreconditionError("unknown bias kind '" + kind + "' (expected arcsine, arcsine_cutoff or fixed)");
    }
    d.validate();
    return d;
}

}  // namespace

nlohmann::json to_json(const AggregateStats& s) {
    return {
        {"trials", s.trials},
        {"completed", s.completed},
        {"cap_hits", s.cap_hits},
        {"mean_catch_all", number_or_null(s.mean_catch_all)},
        {"median_catch_all", number_or_null(s.median_catch_all)},
        {"p90_catch_all", number_or_null(s.p90_catch_all)},
        {"fp_rate", s.fp_rate},
        {"per_user_fp_rate", s.per_user_fp_rate},
        {"fn_rate", s.fn_rate},
        {"per_colluder_fn_rate", s.per_colluder_fn_rate},
        {"mean_overshoot", s.mean_overshoot},
        {"false_positives", s.false_positives},
        {"false_negatives", s.false_negatives},
    };
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j = {
        {"name", c.name},
        {"n", c.n},
        {"c", c.c},
        {"c0", c.c0},
        {"eps1", c.eps1},
        {"eps2", c.eps2},
        {"per_user_epsilons", c.per_user_epsilons},
        {"attack", std::string(to_string(c.attack))},
        {"decoder", std::string(to_string(c.decoder))},
        {"normalize", c.normalize},
        {"scheme", std::string(to_string(c.scheme))},
        {"variant", std::string(to_string(c.variant))},
        {"bias", {{"kind", bias_kind_name(c.bias.kind)}, {"parameter", c.bias.parameter}}},
        {"trials", c.trials},
        {"seed", c.master_seed},
        {"max_segments", c.max_segments},
        {"delay_B", c.delay_B},
        {"taint", c.tainting},
        {"activation_schedule", c.activation_schedule},
    };
    j["length"] = c.length ? nlohmann::json(*c.length) : nlohmann::json(nullptr);
    j["eta_final"] = c.eta_final ? nlohmann::json(*c.eta_final) : nlohmann::json(nullptr);
    j["slope"] = c.slope ? nlohmann::json(*c.slope) : nlohmann::json(nullptr);
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base) {
    require(j.is_object(), "config must be a JSON object");
    if (j.contains("preset")) base = preset(j.at("preset").get<std::string>());
    for (const auto& [key, value] : j.items()) {
        if (key == "preset") continue;
        if (key == "name") base.name = value.get<std::string>();
        else if (key == "n") base.n = value.get<std::size_t>();
        else if (key == "c") base.c = value.get<std::size_t>();
        else if (key == "c0") base.c0 = value.get<std::size_t>();
        else if (key == "eps1") base.eps1 = value.get<double>();
        else if (key == "eps2") base.eps2 = value.get<double>();
        else if (key == "per_user_epsilons") base.per_user_epsilons = value.get<bool>();
        else if (key == "attack") base.attack = parse_attack(value.get<std::string>());
        else if (key == "decoder") base.decoder = parse_decoder(value.get<std::string>());
        else if (key == "normalize") base.normalize = value.get<bool>();
        else if (key == "scheme") base.scheme = parse_scheme(value.get<std::string>());
        else if (key == "variant") base.variant = parse_variant(value.get<std::string>());
        else if (key == "bias") base.bias = bias_from_json(value);
        else if (key == "trials") base.trials = value.get<std::size_t>();
        else if (key == "seed") base.master_seed = value.get<std::uint64_t>();
        else if (key == "max_segments") base.max_segments = value.get<std::size_t>();
        else if (key == "delay_B") base.delay_B = value.get<std::size_t>();
        else if (key == "taint") base.tainting = value.get<bool>();
        else if (key == "activation_schedule") base.activation_schedule = value.get<std::vector<std::size_t>>();
        else if (key == "length") base.length = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
        else if (key == "eta_final") base.eta_final = value.is_null() ? std::nullopt : std::optional(value.get<double>());
        else if (key == "slope") base.slope = value.is_null() ? std::nullopt : std::optional(value.get<double>());
        else throw PreconditionError("unknown config key '" + key + "'");
    }
    return base;
}

}  // namespace tracelab
