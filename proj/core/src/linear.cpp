#include "ipg/linear.hpp"

#include <cassert>
#include <numeric>
#include <set>

namespace ipg::linear {

namespace {

std::int64_t checked(__int128 v) {
    if (v < INT64_MIN || v > INT64_MAX) throw Overflow();
    return static_cast<std::int64_t>(v);
}

}  // namespace

Rat Rat::make(std::int64_t n, std::int64_t d) {
    assert(d != 0);
    if (d < 0) {
        n = checked(-static_cast<__int128>(n));
        d = checked(-static_cast<__int128>(d));
    }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    return {n, d};
}

Rat Rat::operator+(const Rat& o) const {
    __int128 n = static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den;
    __int128 d = static_cast<__int128>(den) * o.den;
    return make(checked(n), checked(d));
}

Rat Rat::operator-(const Rat& o) const { return *this + Rat{checked(-static_cast<__int128>(o.num)), o.den}; }

Rat Rat::operator*(const Rat& o) const {
    __int128 n = static_cast<__int128>(num) * o.num;
    __int128 d = static_cast<__int128>(den) * o.den;
    return make(checked(n), checked(d));
}

Rat Rat::operator/(const Rat& o) const {
    assert(o.num != 0);
    __int128 n = static_cast<__int128>(num) * o.den;
    __int128 d = static_cast<__int128>(den) * o.num;
    return make(checked(n), checked(d));
}

bool Rat::operator<(const Rat& o) const {
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}

namespace {

void drop_zero_coeffs(Constraint& c) {
    for (auto it = c.coeffs.begin(); it != c.coeffs.end();) {
        if (it->second.is_zero())
            it = c.coeffs.erase(it);
        else
            ++it;
    }
}

// Substitutes x_var := expr (a constraint-free linear form) into c.
void substitute(Constraint& c, int var, const std::map<int, Rat>& expr,
                const Rat& expr_const) {
    auto it = c.coeffs.find(var);
    if (it == c.coeffs.end()) return;
    Rat k = it->second;
    c.coeffs.erase(it);
    for (const auto& [v, coef] : expr) {
        auto& slot = c.coeffs[v];
        slot = slot + k * coef;
    }
    c.constant = c.constant + k * expr_const;
    drop_zero_coeffs(c);
}

}  // namespace

bool feasible(std::vector<Constraint> cs) {
    for (auto& c : cs) drop_zero_coeffs(c);

    // Gaussian elimination: repeatedly solve one equality for one variable.
    for (;;) {
        std::size_t pick = cs.size();
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (cs[i].is_equality && !cs[i].coeffs.empty()) {
                pick = i;
                break;
            }
        }
        if (pick == cs.size()) break;
        Constraint eq = cs[pick];
        cs.erase(cs.begin() + static_cast<long>(pick));
        int var = eq.coeffs.begin()->first;
        Rat k = eq.coeffs.begin()->second;
        // var = -(rest + const)/k
        std::map<int, Rat> expr;
        for (const auto& [v, coef] : eq.coeffs)
            if (v != var) expr[v] = -(coef / k);
        Rat expr_const = -(eq.constant / k);
        for (auto& c : cs) substitute(c, var, expr, expr_const);
    }

    // Variable-free constraints are decided directly.
    std::vector<Constraint> ineqs;
    for (auto& c : cs) {
        if (c.coeffs.empty()) {
            if (c.is_equality) {
                if (!c.constant.is_zero()) return false;
            } else if (c.constant.is_negative()) {
                return false;
            }
            continue;
        }
        assert(!c.is_equality);
        ineqs.push_back(std::move(c));
    }

    // Fourier-Motzkin elimination over the remaining inequalities (>= 0).
    while (!ineqs.empty()) {
        int var = ineqs.front().coeffs.begin()->first;
        std::vector<Constraint> lowers, uppers, rest;
        for (auto& c : ineqs) {
            auto it = c.coeffs.find(var);
            if (it == c.coeffs.end())
                rest.push_back(std::move(c));
            else if (it->second.is_negative())
                uppers.push_back(std::move(c));  // x <= (rest)/|k|
            else
                lowers.push_back(std::move(c));  // x >= -(rest)/k
        }
        for (const auto& lo : lowers) {
            for (const auto& up : uppers) {
                // Normalize both to coefficient +/-1 on var, then add.
                Rat kl = lo.coeffs.at(var);
                Rat ku = -(up.coeffs.at(var));
                Constraint combined;
                combined.is_equality = false;
                combined.constant = lo.constant / kl + up.constant / ku;
                for (const auto& [v, coef] : lo.coeffs)
                    if (v != var) combined.coeffs[v] = coef / kl;
                for (const auto& [v, coef] : up.coeffs) {
                    if (v == var) continue;
                    auto& slot = combined.coeffs[v];
                    slot = slot + coef / ku;
                }
                drop_zero_coeffs(combined);
                if (combined.coeffs.empty()) {
                    if (combined.constant.is_negative()) return false;
                } else {
                    rest.push_back(std::move(combined));
                }
            }
        }
        ineqs = std::move(rest);
    }
    return true;
}

}  // namespace ipg::linear
