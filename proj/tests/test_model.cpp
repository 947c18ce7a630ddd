#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "tracelab/model.hpp"

using namespace tracelab;

namespace {

CodeMatrix checker(std::size_t users, std::size_t length) {
    CodeMatrix code(users, length);
    for (std::size_t j = 0; j < users; ++j)
        for (std::size_t i = 1; i <= length; ++i) code.set(j, i, static_cast<int>((i + j) % 2));
    return code;
}

}  // namespace

TEST_CASE("consistent instance validates") {
    BiasVector bias({0.5, 0.5, 0.5, 0.5});
    CoalitionSpec coalition{{0, 1}, 2};
    CHECK_NOTHROW(validate_instance(bias, checker(3, 4), coalition));
}

TEST_CASE("length mismatch is rejected") {
    BiasVector bias({0.5, 0.5, 0.5, 0.5});
    CoalitionSpec coalition{{0, 1}, 2};
    CHECK_THROWS_WITH_AS(validate_instance(bias, checker(3, 5), coalition), doctest::Contains("dimension mismatch"),
                         PreconditionError);
}

TEST_CASE("bias entries must lie strictly inside (0,1)") {
    CHECK_THROWS_WITH_AS(BiasVector({0.5, 0.0}), doctest::Contains("boundary"), PreconditionError);
    CHECK_THROWS_AS(BiasVector({1.0}), PreconditionError);
    CHECK_THROWS_AS(BiasVector(std::vector<double>{}), PreconditionError);
    BiasVector ok({1e-300, 1.0 - 1e-16});
    CHECK(ok.length() == 2);
    CHECK(ok.at(1) == 1e-300);
    CHECK_THROWS_AS(ok.at(0), PreconditionError);
    CHECK_THROWS_AS(ok.at(3), PreconditionError);
}

TEST_CASE("coalition constraints") {
    BiasVector bias({0.3, 0.7});
    CodeMatrix code = checker(4, 2);
    CHECK_THROWS_AS(validate_instance(bias, code, CoalitionSpec{{}, 2}), PreconditionError);
    CHECK_THROWS_AS(validate_instance(bias, code, CoalitionSpec{{0, 1, 2}, 2}), PreconditionError);
    CHECK_THROWS_AS(validate_instance(bias, code, CoalitionSpec{{0}, 5}), PreconditionError);
    CHECK_THROWS_WITH_AS(validate_instance(bias, code, CoalitionSpec{{0, 4}, 3}), doctest::Contains("range"),
                         PreconditionError);
    CHECK_THROWS_AS(validate_instance(bias, code, CoalitionSpec{{1, 1}, 3}), PreconditionError);
    CHECK_NOTHROW(validate_instance(bias, code, CoalitionSpec{{3}, 4}));
}

TEST_CASE("code matrix accessors") {
    CodeMatrix code(2, 3);
    code.set(1, 3, 1);
    CHECK(code.bit(1, 3) == 1);
    CHECK(code.bit(0, 3) == 0);
    CHECK(code.row(1).size() == 3);
    CHECK_THROWS_AS(code.set(0, 1, 2), PreconditionError);
    CHECK_THROWS_AS(code.bit(2, 1), PreconditionError);
    CHECK_THROWS_AS(code.bit(0, 0), PreconditionError);
    CHECK_THROWS_AS(CodeMatrix(2, 2, std::vector<std::uint8_t>{0, 1, 2, 0}), PreconditionError);
}

TEST_CASE("validity survives removing a user row") {
    BiasVector bias({0.2, 0.4, 0.6});
    CodeMatrix code = checker(5, 3);
    CoalitionSpec coalition{{0, 2}, 3};
    REQUIRE_NOTHROW(validate_instance(bias, code, coalition));
    CodeMatrix smaller = code.without_user(4);
    CHECK(smaller.users() == 4);
    CHECK(smaller.row(3)[0] == code.row(3)[0]);
    CHECK_NOTHROW(validate_instance(bias, smaller, coalition));

    CodeMatrix middle = code.without_user(1);
    for (std::size_t i = 1; i <= 3; ++i) CHECK(middle.bit(1, i) == code.bit(2, i));
}

TEST_CASE("user state has exactly one terminal transition") {
    UserState st;
    CHECK(st.active());
    st.settle(UserStatus::accused, 12);
    CHECK(st.status == UserStatus::accused);
    CHECK(st.decided_at == 12);
    CHECK_THROWS_AS(st.settle(UserStatus::acquitted, 13), std::logic_error);
    UserState other;
    CHECK_THROWS_AS(other.settle(UserStatus::active, 1), std::logic_error);
}

TEST_CASE("overshoot stats") {
    OvershootStats s;
    CHECK(s.mean() == 0.0);
    s.add(0.5);
    s.add(1.5);
    CHECK(s.count() == 2);
    CHECK(s.sum() == 2.0);
    CHECK(s.mean() == 1.0);
}
