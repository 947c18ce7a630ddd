#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "tracelab/channel.hpp"

using namespace tracelab;

namespace {

const AttackKind kAttacks[] = {AttackKind::interleaving, AttackKind::all_one, AttackKind::majority,
                               AttackKind::minority, AttackKind::coin};

// Binomial coefficient by Pascal's triangle, independent of binomial_pmf.
double choose(int n, int k) {
    std::vector<double> row(1, 1.0);
    for (int i = 1; i <= n; ++i) {
        std::vector<double> next(i + 1, 1.0);
        for (int j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
        row = next;
    }
    return row[k];
}

double brute_marginal(const CollusionChannel& ch, double p) {
    const int c = static_cast<int>(ch.coalition_size());
    double s = 0.0;
    for (int z = 0; z <= c; ++z) s += choose(c, z) * std::pow(p, z) * std::pow(1 - p, c - z) * ch.theta(z);
    return s;
}

}  // namespace

TEST_CASE("interleaving and all-one definitions") {
    auto inter = make_attack(AttackKind::interleaving, 10);
    CHECK(inter.theta(7) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(inter.theta(0) == 0.0);
    CHECK(inter.theta(10) == 1.0);
    auto all = make_attack(AttackKind::all_one, 10);
    std::vector<double> expected{0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    CHECK(std::vector<double>(all.thetas().begin(), all.thetas().end()) == expected);
}

TEST_CASE("majority, minority and coin") {
    auto maj4 = make_attack(AttackKind::majority, 4);
    CHECK(std::vector<double>(maj4.thetas().begin(), maj4.thetas().end()) == std::vector<double>{0, 0, 0.5, 1, 1});
    auto maj3 = make_attack(AttackKind::majority, 3);
    CHECK(std::vector<double>(maj3.thetas().begin(), maj3.thetas().end()) == std::vector<double>{0, 0, 1, 1});
    auto min4 = make_attack(AttackKind::minority, 4);
    CHECK(std::vector<double>(min4.thetas().begin(), min4.thetas().end()) == std::vector<double>{0, 1, 0.5, 0, 1});
    auto min5 = make_attack(AttackKind::minority, 5);
    CHECK(std::vector<double>(min5.thetas().begin(), min5.thetas().end()) == std::vector<double>{0, 1, 1, 0, 0, 1});
    auto coin = make_attack(AttackKind::coin, 3);
    CHECK(std::vector<double>(coin.thetas().begin(), coin.thetas().end()) == std::vector<double>{0, 0.5, 0.5, 1});
}

TEST_CASE("every attack obeys the marking assumption") {
    for (AttackKind kind : kAttacks) {
        for (std::size_t c = 1; c <= 12; ++c) {
            auto ch = make_attack(kind, c);
            CHECK(ch.coalition_size() == c);
            CHECK(ch.theta(0) == 0.0);
            CHECK(ch.theta(c) == 1.0);
        }
        CHECK_THROWS_AS(make_attack(kind, 0), PreconditionError);
    }
    CHECK_THROWS_AS(CollusionChannel({0.1, 1.0}), PreconditionError);
    CHECK_THROWS_AS(CollusionChannel({0.0, 0.5, 0.9}), PreconditionError);
    CHECK_THROWS_AS(CollusionChannel({0.0, 1.5, 1.0}), PreconditionError);
}

TEST_CASE("attack names round-trip") {
    for (AttackKind kind : kAttacks) CHECK(parse_attack(to_string(kind)) == kind);
    CHECK_THROWS_AS(parse_attack("bogus"), PreconditionError);
}

TEST_CASE("marginal output probability examples") {
    for (std::size_t c : {1u, 2u, 5u, 10u, 37u})
        CHECK(marginal_output_prob(make_attack(AttackKind::interleaving, c), 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    const double p = 0.0693147;
    CHECK(std::abs(marginal_output_prob(make_attack(AttackKind::all_one, 10), p) - (1 - std::pow(1 - p, 10))) < 1e-14);
    CHECK(std::abs(marginal_output_prob(make_attack(AttackKind::all_one, 10), p) - 0.51243946640911734) < 1e-14);
    CHECK(std::abs(marginal_output_prob(make_attack(AttackKind::coin, 3), 0.5) - 0.5) < 1e-15);
    CHECK_THROWS_AS(marginal_output_prob(make_attack(AttackKind::coin, 3), 0.0), PreconditionError);
}

TEST_CASE("marginal matches a brute-force binomial sum") {
    for (AttackKind kind : kAttacks)
        for (std::size_t c : {2u, 5u, 10u})
            for (int k = 1; k < 40; ++k) {
                const double p = k / 40.0;
                auto ch = make_attack(kind, c);
                CHECK(std::abs(marginal_output_prob(ch, p) - brute_marginal(ch, p)) < 1e-13);
            }
}

TEST_CASE("interleaving marginal equals p on a grid") {
    for (std::size_t c : {2u, 3u, 10u, 50u})
        for (int k = 1; k < 100; ++k) {
            const double p = k / 100.0;
            CHECK(std::abs(marginal_output_prob(make_attack(AttackKind::interleaving, c), p) - p) < 1e-12);
        }
}

TEST_CASE("marginal is non-decreasing in p") {
    for (AttackKind kind : {AttackKind::interleaving, AttackKind::all_one, AttackKind::majority, AttackKind::coin})
        for (std::size_t c : {1u, 2u, 5u, 10u}) {
            auto ch = make_attack(kind, c);
            double prev = 0.0;
            for (int k = 1; k < 200; ++k) {
                const double m = marginal_output_prob(ch, k / 200.0);
                CHECK(m >= prev - 1e-15);
                prev = m;
            }
        }
}

TEST_CASE("minority marginal is not monotone") {
    // theta = [0,1,1,0,0,1]: the output falls once most colluders hold a 1.
    auto ch = make_attack(AttackKind::minority, 5);
    CHECK(marginal_output_prob(ch, 0.3) > marginal_output_prob(ch, 0.7));
    CHECK(marginal_output_prob(make_attack(AttackKind::minority, 2), 0.5) == doctest::Approx(0.5));
}

TEST_CASE("pirate output follows theta") {
    auto all = make_attack(AttackKind::all_one, 3);
    CounterRng rng(derive_key(1, Stream::pirate));
    const std::uint8_t bits[] = {0, 0, 1};
    for (int t = 0; t < 1000; ++t) CHECK(pirate_output(all, bits, rng) == 1);

    auto inter4 = make_attack(AttackKind::interleaving, 4);
    const std::uint8_t zeros[] = {0, 0, 0, 0};
    for (int t = 0; t < 1000; ++t) CHECK(pirate_output(inter4, zeros, rng) == 0);

    auto inter10 = make_attack(AttackKind::interleaving, 10);
    int ones = 0;
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) ones += pirate_output(inter10, std::size_t{7}, rng);
    CHECK(std::abs(static_cast<double>(ones) / draws - 0.7) < 0.005);
}

TEST_CASE("pirate output errors and determinism") {
    auto ch = make_attack(AttackKind::interleaving, 2);
    CounterRng rng(5);
    std::vector<std::uint8_t> none;
    CHECK_THROWS_WITH_AS(pirate_output(ch, none, rng), doctest::Contains("empty coalition"), PreconditionError);
    const std::uint8_t three[] = {1, 0, 1};
    CHECK_THROWS_AS(pirate_output(ch, three, rng), PreconditionError);

    CounterRng a(77), b(77);
    const std::uint8_t mixed[] = {1, 0};
    for (int t = 0; t < 100; ++t) CHECK(pirate_output(ch, mixed, a) == pirate_output(ch, mixed, b));
}
