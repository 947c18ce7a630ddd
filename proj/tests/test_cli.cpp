#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

using namespace tracelab;
using nlohmann::json;

namespace {

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "tracelab");
    std::ostringstream out, err;
    const int status = cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "tracelab_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("thresholds") {
    auto r = invoke({"thresholds", "--eps1", "1e-3", "--n", "1000", "--c", "10"});
    REQUIRE(r.status == 0);
    auto j = json::parse(r.out);
    CHECK(std::abs(j.at("eta1").get<double>() - 13.8155) < 1e-4);
    CHECK(j.at("eta0").is_null());
    CHECK(j.at("eps1_per_user").get<double>() == doctest::Approx(1e-6));

    auto a = invoke({"thresholds", "--eps1", "0.05", "--eps2", "0.05", "--variant", "aggressive"});
    REQUIRE(a.status == 0);
    auto ja = json::parse(a.out);
    CHECK(std::abs(ja.at("eta1").get<double>() - std::log(19.0)) < 1e-12);
    CHECK(std::abs(ja.at("eta0").get<double>() + std::log(19.0)) < 1e-12);
}

TEST_CASE("analyze interleaving") {
    auto r = invoke({"analyze", "--c", "10", "--n", "1000", "--eps1", "1e-3"});
    REQUIRE(r.status == 0);
    auto j = json::parse(r.out);
    CHECK(std::abs(j.at("mu0").get<double>() - (-0.00343)) < 1e-5);
    CHECK(std::abs(j.at("mu1").get<double>() - 0.00382) < 1e-5);
    CHECK(std::abs(j.at("eta1").get<double>() - 13.8155) < 1e-4);
    CHECK(std::abs(j.at("asymptotic_length").get<double>() - 1381.55) < 0.01);
    CHECK(std::abs(j.at("I").get<double>() - 0.2276376299174112) < 1e-10);
    CHECK(std::abs(j.at("predicted_T_h1").get<double>() - 13.815510557964274 / 0.0038202608494631713) < 1e-3);
}

TEST_CASE("analyze group testing") {
    auto r = invoke({"analyze", "--attack", "all_one", "--c", "10", "--n", "1000"});
    REQUIRE(r.status == 0);
    auto j = json::parse(r.out);
    CHECK(j.at("mu0").is_null());
    CHECK(std::abs(j.at("group_testing_lengths").at("simple").get<double>() - 143.8) < 0.05);
}

TEST_CASE("presets listing") {
    auto r = invoke({"presets"});
    REQUIRE(r.status == 0);
    auto j = json::parse(r.out);
    REQUIRE(j.size() == 5);
    bool saw_vertical = false;
    for (const auto& e : j) {
        if (e.at("name") == "wald_interleaving_toy") CHECK(std::abs(e.at("eta1").get<double>() - 13.8155) < 1e-4);
        if (e.at("name") == "tardos_grouptesting_toy") saw_vertical = e.at("vertical_boundary").get<bool>();
    }
    CHECK(saw_vertical);
}

TEST_CASE("simulate writes identical csv on repeated runs") {
    const auto out1 = scratch("a.csv"), out2 = scratch("b.csv"), ev1 = scratch("a_events.csv"),
               ev2 = scratch("b_events.csv");
    const std::vector<std::string> base = {"simulate", "--preset", "wald_interleaving_toy", "--n", "150", "--c", "3",
                                           "--c0", "3", "--trials", "5", "--seed", "77"};
    auto args1 = base, args2 = base;
    for (auto s : {"--out", out1.c_str(), "--events", ev1.c_str()}) args1.push_back(s);
    for (auto s : {"--out", out2.c_str(), "--events", ev2.c_str(), "--parallelism", "3"}) args2.push_back(s);
    auto r1 = invoke(args1);
    auto r2 = invoke(args2);
    REQUIRE(r1.status == 0);
    REQUIRE(r2.status == 0);
    CHECK(r1.out == r2.out);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(ev1) == slurp(ev2));
    CHECK(slurp(out1).rfind("trial,catch_all_time,", 0) == 0);
    auto j = json::parse(r1.out);
    CHECK(j.at("config").at("seed") == 77);
    CHECK(j.at("config").at("n") == 150);
    CHECK(j.at("aggregate").at("trials") == 5);
}

TEST_CASE("simulate reads a json config") {
    const auto cfg = scratch("cfg.json");
    {
        std::ofstream f(cfg);
        f << R"({"preset": "wald_grouptesting_toy", "trials": 2, "seed": 5})";
    }
    auto r = invoke({"simulate", "--config", cfg.string(), "--trials", "3"});
    REQUIRE(r.status == 0);
    auto j = json::parse(r.out);
    CHECK(j.at("config").at("attack") == "all_one");
    CHECK(j.at("config").at("trials") == 3);
    CHECK(j.at("config").at("seed") == 5);
}

TEST_CASE("seed falls back to the environment") {
    ::setenv("TRACELAB_SEED", "4242", 1);
    cli::CliRequest req;
    req.command = cli::Command::simulate;
    req.overrides["preset"] = "wald_interleaving_toy";
    CHECK(cli::resolve_experiment(req).master_seed == 4242);
    req.seed = 7;
    CHECK(cli::resolve_experiment(req).master_seed == 7);
    ::setenv("TRACELAB_SEED", "x1", 1);
    req.seed.reset();
    CHECK_THROWS_AS(cli::resolve_experiment(req), PreconditionError);
    ::unsetenv("TRACELAB_SEED");
}

TEST_CASE("diagnostics name the violated precondition") {
    auto r = invoke({"simulate", "--preset", "wald_interleaving_toy", "--c", "12"});
    CHECK(r.status == 2);
    CHECK(r.err.find("c0") != std::string::npos);

    auto e = invoke({"thresholds", "--eps1", "0"});
    CHECK(e.status == 2);
    CHECK(e.err.find("eps1") != std::string::npos);

    auto bad = invoke({"simulate", "--preset", "wald_interleaving_toy", "--n", "ten"});
    CHECK(bad.status == 2);
    CHECK(bad.err.find("--n") != std::string::npos);

    auto attack = invoke({"analyze", "--attack", "shuffle"});
    CHECK(attack.status == 2);
    CHECK(attack.err.find("shuffle") != std::string::npos);

    auto missing = invoke({"simulate", "--config", "/nonexistent/cfg.json"});
    CHECK(missing.status == 2);
    CHECK(missing.err.find("cannot open") != std::string::npos);

    CHECK(invoke({}).status != 0);
    CHECK(invoke({"frobnicate"}).status != 0);
    CHECK(invoke({"--help"}).status == 0);
}
