#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>
#include <json.hpp>

#include "tracelab/accusation.hpp"
#include "tracelab/analysis.hpp"
#include "tracelab/io.hpp"
#include "tracelab/scoring.hpp"

namespace tracelab::cli {

namespace {

using nlohmann::json;

std::size_t parse_count(const std::string& name, const std::string& text) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    require(pos == text.size() && !text.empty() && text[0] != '-',
            "--" + name + " expects a non-negative integer, got '" + text + "'");
    return static_cast<std::size_t>(v);
}

double parse_real(const std::string& name, const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    require(pos == text.size() && !text.empty(), "--" + name + " expects a number, got '" + text + "'");
    return v;
}

bool parse_bool(const std::string& name, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw PreconditionError("--" + name + " expects true or false, got '" + text + "'");
}

std::string get_or(const std::map<std::string, std::string>& m, const std::string& key, const std::string& fallback) {
    auto it = m.find(key);
    return it == m.end() ? fallback : it->second;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const std::string& path, const auto& writer) {
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), "cannot open output file '" + path + "'");
    writer(f);
    require(static_cast<bool>(f), "failed writing output file '" + path + "'");
}

int simulate(const CliRequest& request, std::ostream& out) {
    const ExperimentConfig config = resolve_experiment(request);
    const ExperimentResult result = run_experiment(config, request.parallelism);
    if (request.out_path) write_file(*request.out_path, [&](std::ostream& f) { write_trials_csv(f, result.trials); });
    if (request.events_path) {
        write_file(*request.events_path, [&](std::ostream& f) { write_events_csv(f, result.trials); });
    }
    json report = {{"config", to_json(config)}, {"aggregate", to_json(result.stats)}};
    out << report.dump(2) << '\n';
    return 0;
}

int thresholds(const CliRequest& request, std::ostream& out) {
    const auto& o = request.overrides;
    const double eps1 = parse_real("eps1", get_or(o, "eps1", "1e-3"));
    const double eps2 = parse_real("eps2", get_or(o, "eps2", "0"));
    const std::size_t n = parse_count("n", get_or(o, "n", "1"));
    const std::size_t c = parse_count("c", get_or(o, "c", "1"));
    const WaldVariant variant = parse_variant(get_or(o, "variant", "upper-only"));
    const ErrorPair per_user = per_user_epsilons(eps1, eps2, n, c);
    const Boundary b = wald_thresholds(per_user.eps1, per_user.eps2, variant);
    json report = {
        {"variant", std::string(to_string(variant))},
        {"eps1_per_user", per_user.eps1},
        {"eps2_per_user", per_user.eps2},
        {"eta0", b.lower ? json(b.lower->intercept) : json(nullptr)},
        {"eta1", b.upper->intercept},
    };
    out << report.dump(2) << '\n';
    return 0;
}

int analyze(const CliRequest& request, std::ostream& out) {
    const auto& o = request.overrides;
    const std::size_t c = parse_count("c", get_or(o, "c", "10"));
    const std::size_t c0 = parse_count("c0", get_or(o, "c0", std::to_string(c)));
    const std::size_t n = parse_count("n", get_or(o, "n", "1000"));
    const double eps1 = parse_real("eps1", get_or(o, "eps1", "1e-3"));
    const double eps2 = parse_real("eps2", get_or(o, "eps2", "0"));
    const AttackKind attack = parse_attack(get_or(o, "attack", "interleaving"));
    require(c >= 1 && c <= c0, "analysis requires 1 <= c <= c0");
    require(n >= 2, "analysis requires n >= 2");

    DecoderKind decoder = DecoderKind::generic_np;
    if (attack == AttackKind::interleaving) decoder = DecoderKind::interleaving_ll;
    if (attack == AttackKind::all_one) decoder = DecoderKind::all_one;
    if (o.contains("decoder")) decoder = parse_decoder(o.at("decoder"));
    const BiasDistribution bias = attack == AttackKind::all_one
                                      ? BiasDistribution::fixed(std::numbers::ln2 / static_cast<double>(c))
                                      : BiasDistribution::arcsine();

    const ScoreFunction score = ScoreFunction::make(decoder, c0, attack);
    const SegmentMoments m = averaged_moments(score, make_attack(attack, c), bias);
    const ErrorPair per_user = per_user_epsilons(eps1, eps2, n, c0);
    const Boundary b = wald_thresholds(per_user.eps1, per_user.eps2,
                                       per_user.eps2 > 0.0 ? WaldVariant::conservative : WaldVariant::upper_only);
    const double mu0 = m.innocent_drift();

    json report = {
        {"c", c},
        {"n", n},
        {"eps1", eps1},
        {"eps2", eps2},
        {"attack", std::string(to_string(attack))},
        {"decoder", std::string(to_string(decoder))},
        {"bias", bias.describe()},
        {"mu0", nullable(mu0)},
        {"mu1", m.mu1},
        {"sigma0", m.sigma0},
        {"sigma1", m.sigma1},
        {"eta1", b.upper->intercept},
        {"asymptotic_length", asymptotic_code_length(c, static_cast<double>(n))},
    };
    report["I"] = attack == AttackKind::interleaving && c >= 2 ? json(appendix_integral(c).I) : json(nullptr);
    report["predicted_T_h1"] = nullptr;
    if (mu0 < 0.0 && m.mu1 > 0.0) {
        report["predicted_T_h1"] = expected_termination(per_user.eps1, per_user.eps2, mu0, m.mu1).approx_T_h1;
    }
    if (attack == AttackKind::all_one) {
        const GroupTestingLengths g = group_testing_lengths(c, static_cast<double>(n));
        report["group_testing_lengths"] = {{"simple", g.simple}, {"joint", g.joint}};
    }
    out << report.dump(2) << '\n';
    return 0;
}

int presets(std::ostream& out) {
    json list = json::array();
    for (const std::string& name : preset_names()) {
        const PreparedExperiment prepared(preset(name));
        json entry = to_json(prepared.config());
        const Boundary& b = prepared.engine().boundary;
        entry["eta1"] = b.upper ? json(b.upper->intercept) : json(nullptr);
        entry["eta0"] = b.lower ? json(b.lower->intercept) : json(nullptr);
        entry["boundary_slope"] = b.upper ? json(b.upper->slope) : json(nullptr);
        entry["vertical_boundary"] = !b.upper.has_value();
        list.push_back(entry);
    }
    out << list.dump(2) << '\n';
    return 0;
}

}  // namespace

void apply_overrides(ExperimentConfig& config, const std::map<std::string, std::string>& overrides) {
    for (const auto& [name, value] : overrides) {
        if (name == "n") config.n = parse_count(name, value);
        else if (name == "c") config.c = parse_count(name, value);
        else if (name == "c0") config.c0 = parse_count(name, value);
        else if (name == "eps1") config.eps1 = parse_real(name, value);
        else if (name == "eps2") config.eps2 = parse_real(name, value);
        else if (name == "attack") config.attack = parse_attack(value);
        else if (name == "decoder") config.decoder = parse_decoder(value);
        else if (name == "scheme") config.scheme = parse_scheme(value);
        else if (name == "variant") config.variant = parse_variant(value);
        else if (name == "delay-B") config.delay_B = parse_count(name, value);
        else if (name == "taint") config.tainting = parse_bool(name, value);
        else if (name == "trials") config.trials = parse_count(name, value);
        else if (name == "max-segments") config.max_segments = parse_count(name, value);
        else if (name == "length") config.length = parse_count(name, value);
        else if (name == "eta-final") config.eta_final = parse_real(name, value);
        else if (name == "slope") config.slope = parse_real(name, value);
        else throw PreconditionError("unknown override --" + name);
    }
}

ExperimentConfig resolve_experiment(const CliRequest& request) {
    ExperimentConfig config;
    if (request.config_path) {
        std::ifstream f(*request.config_path);
        require(static_cast<bool>(f), "cannot open config file '" + *request.config_path + "'");
        json j;
        try {
            f >> j;
        } catch (const json::exception& e) {
            throw PreconditionError("config file is not valid JSON: " + std::string(e.what()));
        }
        config = config_from_json(j);
    }
    auto overrides = request.overrides;
    if (auto it = overrides.find("preset"); it != overrides.end()) {
        config = preset(it->second);
        overrides.erase(it);
    }
    apply_overrides(config, overrides);
    if (request.seed) {
        config.master_seed = *request.seed;
    } else if (const char* env = std::getenv("TRACELAB_SEED"); env != nullptr && *env != '\0') {
        config.master_seed = parse_count("TRACELAB_SEED", env);
    }
    config.validate();
    return config;
}

std::optional<CliRequest> parse_request(const std::vector<std::string>& args, std::ostream& out,
                                        std::ostream& err, int& status) {
    CLI::App app{"Sequential collusion-resistant fingerprinting workbench"};
    app.require_subcommand(1);

    CliRequest request;
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> bound;
    std::string config_path, out_path, events_path;
    std::uint64_t seed = 0;
    std::size_t parallelism = 1;

    auto value_flag = [&](CLI::App* sub, const std::string& name, const std::string& help) {
        bound.emplace_back(name, sub->add_option("--" + name, values[name], help));
    };

    auto* sim = app.add_subcommand("simulate", "Run Monte Carlo trials and write CSV + JSON");
    sim->add_option("--config", config_path, "JSON experiment config (flags override it)");
    value_flag(sim, "preset", "Start from a named preset");
    for (const char* name : {"n", "c", "c0", "eps1", "eps2", "attack", "decoder", "scheme", "variant", "delay-B",
                             "trials", "max-segments", "length", "eta-final", "slope"}) {
        value_flag(sim, name, std::string("Override ") + name);
    }
    auto* taint = sim->add_flag("--taint", "Exclude tainted segments after each accusation");
    auto* seed_opt = sim->add_option("--seed", seed, "Master seed (fallback: TRACELAB_SEED)");
    sim->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
    auto* out_opt = sim->add_option("--out", out_path, "Per-trial CSV path");
    auto* events_opt = sim->add_option("--events", events_path, "Per-event CSV path");

    auto* thr = app.add_subcommand("thresholds", "Print SPRT thresholds for global error targets");
    for (const char* name : {"eps1", "eps2", "n", "c", "variant"}) value_flag(thr, name, std::string("Set ") + name);

    auto* ana = app.add_subcommand("analyze", "Print drift, threshold and length predictions as JSON");
    for (const char* name : {"c", "c0", "n", "eps1", "eps2", "attack", "decoder"}) {
        value_flag(ana, name, std::string("Set ") + name);
    }

    auto* pre = app.add_subcommand("presets", "List bundled presets and their parameters");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        status = app.exit(e, out, err);
        return std::nullopt;
    }

    if (sim->parsed()) request.command = Command::simulate;
    if (thr->parsed()) request.command = Command::thresholds;
    if (ana->parsed()) request.command = Command::analyze;
    if (pre->parsed()) request.command = Command::presets;
    for (const auto& [name, opt] : bound) {
        if (opt->count() > 0) request.overrides[name] = values[name];
    }
    if (taint->count() > 0) request.overrides["taint"] = "true";
    if (!config_path.empty()) request.config_path = config_path;
    if (seed_opt->count() > 0) request.seed = seed;
    if (out_opt->count() > 0) request.out_path = out_path;
    if (events_opt->count() > 0) request.events_path = events_path;
    request.parallelism = parallelism;
    return request;
}

int execute(const CliRequest& request, std::ostream& out, std::ostream& err) {
    try {
        switch (request.command) {
            case Command::simulate: return simulate(request, out);
            case Command::thresholds: return thresholds(request, out);
            case Command::analyze: return analyze(request, out);
            case Command::presets: return presets(out);
        }
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    int status = 0;
    const auto request = parse_request(args, out, err, status);
    if (!request) return status;
    return execute(*request, out, err);
}

}  // namespace tracelab::cli
