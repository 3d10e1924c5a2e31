#pragma once

// Interval-based monadic parser combinators. The state is the triple
// (l, r, c): the current half-open interval [l, r) of absolute offsets plus
// the current position c. Combinators never read bytes outside [l, r).

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ipg::comb {

struct Input {
    const std::uint8_t* data = nullptr;
    std::size_t size = 0;

    static Input of(const std::vector<std::uint8_t>& v) { return {v.data(), v.size()}; }
    static Input of(const std::string& s) {
        return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
    }
};

struct State {
    std::int64_t l = 0;
    std::int64_t r = 0;
    std::int64_t c = 0;
    bool operator==(const State&) const = default;
};

template <class T>
using Result = std::optional<std::pair<T, State>>;

template <class T>
using Parser = std::function<Result<T>(Input, State)>;

struct Unit {
    bool operator==(const Unit&) const = default;
};

template <class T>
Parser<T> unit(T v) {
    return [v](Input, State st) -> Result<T> { return {{v, st}}; };
}

// chain(p, f): monadic bind.
template <class T, class F>
auto chain(Parser<T> p, F f)
    -> Parser<typename std::invoke_result_t<F, T>::result_type::value_type::first_type> {
    using U =
        typename std::invoke_result_t<F, T>::result_type::value_type::first_type;
    return [p = std::move(p), f = std::move(f)](Input in, State st) -> Result<U> {
        auto r1 = p(in, st);
        if (!r1) return std::nullopt;
        return f(r1->first)(in, r1->second);
    };
}

template <class T, class F>
auto map(Parser<T> p, F f) -> Parser<std::invoke_result_t<F, T>> {
    using U = std::invoke_result_t<F, T>;
    return [p = std::move(p), f = std::move(f)](Input in, State st) -> Result<U> {
        auto r1 = p(in, st);
        if (!r1) return std::nullopt;
        return {{f(r1->first), r1->second}};
    };
}

inline Parser<std::pair<std::int64_t, std::int64_t>> get_interval() {
    return [](Input, State st) -> Result<std::pair<std::int64_t, std::int64_t>> {
        return {{{st.l, st.r}, st}};
    };
}

// Succeeds only for a non-empty interval; resets position to l.
inline Parser<Unit> set_interval(std::int64_t l, std::int64_t r) {
    return [l, r](Input, State) -> Result<Unit> {
        if (l < r) return {{Unit{}, State{l, r, l}}};
        return std::nullopt;
    };
}

inline Parser<std::int64_t> get_pos() {
    return [](Input, State st) -> Result<std::int64_t> { return {{st.c, st}}; };
}

inline Parser<Unit> set_pos(std::int64_t c) {
    return [c](Input, State st) -> Result<Unit> {
        return {{Unit{}, State{st.l, st.r, c}}};
    };
}

// End of the current interval as a relative offset (its length).
inline Parser<std::int64_t> eoi() {
    return [](Input, State st) -> Result<std::int64_t> { return {{st.r - st.l, st}}; };
}

// Runs p on the sub-interval [l, r) given relative to the current interval,
// then restores the outer interval with the position just past the
// sub-interval. The restore is a raw state write so that empty outer
// intervals survive the round trip.
template <class T>
Parser<T> local(Parser<T> p, std::int64_t l, std::int64_t r) {
    return [p, l, r](Input in, State st) -> Result<T> {
        std::int64_t lg = st.l, rg = st.r;
        if (l < 0 || r > rg - lg) return std::nullopt;
        if (!(lg + l < lg + r)) return std::nullopt;  // set_interval's l < r check
        auto r1 = p(in, State{lg + l, lg + r, lg + l});
        if (!r1) return std::nullopt;
        return {{r1->first, State{lg, rg, lg + r}}};
    };
}

// Biased choice: q runs from the original state only if p fails.
template <class T>
Parser<T> alt(Parser<T> p, Parser<T> q) {
    return [p = std::move(p), q = std::move(q)](Input in, State st) -> Result<T> {
        auto r1 = p(in, st);
        if (r1) return r1;
        return q(in, st);
    };
}

template <class T, class U>
Parser<std::pair<T, U>> seq(Parser<T> p, Parser<U> q) {
    return chain(std::move(p), [q = std::move(q)](T a) {
        return map(q, [a](U b) { return std::pair<T, U>{a, b}; });
    });
}

// Sequence keeping only the left / right value.
template <class T, class U>
Parser<T> seql(Parser<T> p, Parser<U> q) {
    return map(seq(std::move(p), std::move(q)),
               [](std::pair<T, U> v) { return v.first; });
}

template <class T, class U>
Parser<U> seqr(Parser<T> p, Parser<U> q) {
    return map(seq(std::move(p), std::move(q)),
               [](std::pair<T, U> v) { return v.second; });
}

// Matches one byte at the current position inside the interval.
inline Parser<std::uint8_t> char_p(std::uint8_t b) {
    return [b](Input in, State st) -> Result<std::uint8_t> {
        if (st.l <= st.c && st.c < st.r &&
            static_cast<std::size_t>(st.c) < in.size && in.data[st.c] == b)
            return {{b, State{st.l, st.r, st.c + 1}}};
        return std::nullopt;
    };
}

inline Parser<Unit> str_p(std::vector<std::uint8_t> bytes) {
    return [bytes = std::move(bytes)](Input in, State st) -> Result<Unit> {
        State cur = st;
        for (std::uint8_t b : bytes) {
            if (!(cur.l <= cur.c && cur.c < cur.r &&
                  static_cast<std::size_t>(cur.c) < in.size && in.data[cur.c] == b))
                return std::nullopt;
            cur.c += 1;
        }
        return {{Unit{}, cur}};
    };
}

// Ties the recursive knot: fix(f) where f maps a parser to a parser.
template <class T>
Parser<T> fix(std::function<Parser<T>(Parser<T>)> f) {
    auto self = std::make_shared<Parser<T>>();
    Parser<T> rec = [self](Input in, State st) { return (*self)(in, st); };
    *self = f(rec);
    return rec;
}

// Runs p exactly n times, collecting values.
template <class T>
Parser<std::vector<T>> arr(std::size_t n, Parser<T> p) {
    return [n, p = std::move(p)](Input in, State st) -> Result<std::vector<T>> {
        std::vector<T> values;
        State cur = st;
        for (std::size_t i = 0; i < n; ++i) {
            auto r1 = p(in, cur);
            if (!r1) return std::nullopt;
            values.push_back(std::move(r1->first));
            cur = r1->second;
        }
        return {{std::move(values), cur}};
    };
}

}  // namespace ipg::comb
