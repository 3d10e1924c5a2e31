#include "doctest.h"
#include "ipg/linear.hpp"

using namespace ipg::linear;

namespace {

Constraint eq(std::map<int, Rat> coeffs, std::int64_t c) {
    Constraint k;
    k.coeffs = std::move(coeffs);
    k.constant = Rat::of(c);
    k.is_equality = true;
    return k;
}

Constraint ge(std::map<int, Rat> coeffs, std::int64_t c) {
    Constraint k = eq(std::move(coeffs), c);
    k.is_equality = false;
    return k;
}

}  // namespace

TEST_CASE("rational arithmetic normalizes") {
    auto half = Rat::make(2, 4);
    CHECK(half == Rat::make(1, 2));
    CHECK((half + half) == Rat::of(1));
    CHECK(Rat::make(1, -2) == Rat::make(-1, 2));
    CHECK((Rat::of(1) - Rat::make(1, 3)) == Rat::make(2, 3));
    CHECK(Rat::make(-3, 6).is_negative());
}

TEST_CASE("empty and trivially satisfied systems are feasible") {
    CHECK(feasible({}));
    CHECK(feasible({eq({}, 0)}));
    CHECK(feasible({ge({}, 5)}));
    CHECK_FALSE(feasible({eq({}, 1)}));   // 1 = 0
    CHECK_FALSE(feasible({ge({}, -1)}));  // -1 >= 0
}

TEST_CASE("equalities solve by substitution") {
    // x + y - 3 = 0, x - y - 1 = 0  =>  x=2, y=1.
    CHECK(feasible({eq({{0, Rat::of(1)}, {1, Rat::of(1)}}, -3),
                    eq({{0, Rat::of(1)}, {1, Rat::of(-1)}}, -1)}));
    // Add x - 5 = 0: inconsistent.
    CHECK_FALSE(feasible({eq({{0, Rat::of(1)}, {1, Rat::of(1)}}, -3),
                          eq({{0, Rat::of(1)}, {1, Rat::of(-1)}}, -1),
                          eq({{0, Rat::of(1)}}, -5)}));
}

TEST_CASE("inequality elimination") {
    // x - 3 >= 0 and -x + 10 >= 0: feasible.
    CHECK(feasible({ge({{0, Rat::of(1)}}, -3), ge({{0, Rat::of(-1)}}, 10)}));
    // x - 3 >= 0 and -x + 2 >= 0: infeasible.
    CHECK_FALSE(feasible({ge({{0, Rat::of(1)}}, -3), ge({{0, Rat::of(-1)}}, 2)}));
    // Rational witness: 2x - 1 = 0 is fine on its own...
    CHECK(feasible({eq({{0, Rat::of(2)}}, -1)}));
    // ...but not with x >= 1.
    CHECK_FALSE(feasible({eq({{0, Rat::of(2)}}, -1), ge({{0, Rat::of(1)}}, -1)}));
}

TEST_CASE("mixed systems") {
    // x >= 0, y >= 0, x + y + 1 = 0: infeasible.
    CHECK_FALSE(feasible({ge({{0, Rat::of(1)}}, 0), ge({{1, Rat::of(1)}}, 0),
                          eq({{0, Rat::of(1)}, {1, Rat::of(1)}}, 1)}));
    // x >= 1, y >= 1, x + y - 2 = 0: feasible only at x=y=1.
    CHECK(feasible({ge({{0, Rat::of(1)}}, -1), ge({{1, Rat::of(1)}}, -1),
                    eq({{0, Rat::of(1)}, {1, Rat::of(1)}}, -2)}));
    // Same but x + y - 1 = 0: infeasible.
    CHECK_FALSE(feasible({ge({{0, Rat::of(1)}}, -1), ge({{1, Rat::of(1)}}, -1),
                          eq({{0, Rat::of(1)}, {1, Rat::of(1)}}, -1)}));
}

TEST_CASE("free variables do not block feasibility") {
    // z unconstrained alongside an infeasible pair still infeasible.
    CHECK_FALSE(feasible({ge({{0, Rat::of(1)}}, -3), ge({{0, Rat::of(-1)}}, 2),
                          eq({{7, Rat::of(1)}, {8, Rat::of(-1)}}, 0)}));
    // Chain x = y, y = z, z >= 4, -x >= -4 pins everything to 4.
    CHECK(feasible({eq({{0, Rat::of(1)}, {1, Rat::of(-1)}}, 0),
                    eq({{1, Rat::of(1)}, {2, Rat::of(-1)}}, 0),
                    ge({{2, Rat::of(1)}}, -4), ge({{0, Rat::of(-1)}}, 4)}));
    // And z >= 5 with -x >= -4 breaks the chain.
    CHECK_FALSE(feasible({eq({{0, Rat::of(1)}, {1, Rat::of(-1)}}, 0),
                          eq({{1, Rat::of(1)}, {2, Rat::of(-1)}}, 0),
                          ge({{2, Rat::of(1)}}, -5), ge({{0, Rat::of(-1)}}, 4)}));
}

TEST_CASE("overflow raises instead of answering") {
    const std::int64_t big = 3037000500;  // big*big > 2^63
    CHECK_THROWS_AS(
        (void)feasible({eq({{0, Rat::make(1, big)}, {1, Rat::of(big)}}, 1),
                        eq({{0, Rat::of(big)}, {1, Rat::make(1, big)}}, 1),
                        ge({{0, Rat::of(big)}}, -1)}),
        Overflow);
}
