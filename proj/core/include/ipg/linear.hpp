#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace ipg::linear {

// Thrown when exact rational arithmetic would overflow 64 bits; callers
// should treat the system as undecided.
struct Overflow : std::runtime_error {
    Overflow() : std::runtime_error("rational overflow") {}
};

// Exact rational with a positive denominator.
struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rat of(std::int64_t n) { return {n, 1}; }
    static Rat make(std::int64_t n, std::int64_t d);

    bool is_zero() const { return num == 0; }
    bool is_negative() const { return num < 0; }

    Rat operator+(const Rat& o) const;
    Rat operator-(const Rat& o) const;
    Rat operator*(const Rat& o) const;
    Rat operator/(const Rat& o) const;  // throws Overflow on /0? no: asserts o != 0
    Rat operator-() const { return {-num, den}; }
    bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rat& o) const;
};

// sum(coeffs[v] * x_v) + constant, compared against 0.
struct Constraint {
    std::map<int, Rat> coeffs;
    Rat constant;
    bool is_equality = true;  // false: >= 0
};

// Rational feasibility of a conjunction of linear constraints: Gaussian
// elimination over the equalities, then Fourier-Motzkin elimination over
// the inequalities. Throws Overflow when coefficients blow up.
bool feasible(std::vector<Constraint> cs);

}  // namespace ipg::linear
