#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "ipg/comb.hpp"
#include "ipg/check.hpp"
#include "ipg/engine.hpp"
#include "test_util.hpp"

using namespace ipg::comb;

namespace {

using I64 = std::int64_t;

// One-digit binary numeral over the whole current interval's first byte.
Parser<I64> digit_p() {
    return alt<I64>(map(char_p('0'), [](std::uint8_t) { return I64{0}; }),
                    map(char_p('1'), [](std::uint8_t) { return I64{1}; }));
}

// Binary numeral parser mirroring the recursive interval grammar:
// value(s) = 2 * value(s[0..n-1]) + digit(s[n-1]) with a one-digit base case.
Parser<I64> int_p() {
    return fix<I64>([](Parser<I64> rec) {
        auto recursive = chain(eoi(), [rec](I64 n) -> Parser<I64> {
            return chain(local(rec, 0, n - 1), [n](I64 hi) {
                return map(local(digit_p(), n - 1, n),
                           [hi](I64 lo) { return 2 * hi + lo; });
            });
        });
        return alt<I64>(recursive, local(digit_p(), 0, 1));
    });
}

const std::vector<State> kStates = [] {
    std::vector<State> out;
    for (I64 l = 0; l <= 3; ++l)
        for (I64 r = 0; r <= 3; ++r)
            for (I64 c = 0; c <= 3; ++c) out.push_back(State{l, r, c});
    return out;
}();

const std::vector<std::string> kInputs = {"", "0", "1", "a", "01", "10",
                                          "aa", "010", "110", "abc"};

template <class T>
bool same(const Parser<T>& p, const Parser<T>& q) {
    for (const auto& s : kInputs) {
        auto in = Input::of(s);
        for (const auto& st : kStates)
            if (p(in, st) != q(in, st)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("monad laws hold on exhaustive small states") {
    auto f = [](I64 v) -> Parser<I64> {
        return map(char_p('0'), [v](std::uint8_t) { return v + 1; });
    };
    auto g = [](I64 v) -> Parser<I64> {
        return v % 2 ? unit(v * 3) : seqr(set_pos(v), unit(v));
    };
    std::vector<Parser<I64>> samples = {
        unit<I64>(7), get_pos(), eoi(),
        map(char_p('1'), [](std::uint8_t b) { return I64{b}; }),
        seqr(set_interval(1, 3), get_pos()), int_p()};

    for (I64 v : {0, 1, 2, 5}) {
        // Left identity: unit(v) >>= f  ==  f(v).
        CHECK(same(chain(unit(v), f), f(v)));
        CHECK(same(chain(unit(v), g), g(v)));
    }
    for (const auto& p : samples) {
        // Right identity: p >>= unit  ==  p.
        CHECK(same(chain(p, [](I64 v) { return unit(v); }), p));
        // Associativity: (p >>= f) >>= g  ==  p >>= (\x -> f(x) >>= g).
        CHECK(same(chain(chain(p, f), g),
                   chain(p, [&](I64 v) { return chain(f(v), g); })));
    }
}

TEST_CASE("set_interval requires a non-empty interval and resets position") {
    std::string data = "abcdefgh";
    auto in = Input::of(data);
    CHECK_FALSE(set_interval(3, 3)(in, State{0, 8, 0}).has_value());
    CHECK_FALSE(set_interval(5, 2)(in, State{0, 8, 0}).has_value());
    auto r = seqr(set_interval(2, 6), get_pos())(in, State{0, 8, 7});
    REQUIRE(r.has_value());
    CHECK(r->first == 2);
    CHECK(r->second == State{2, 6, 2});
}

TEST_CASE("local runs on the sub-interval and restores the outer one") {
    std::string data = "xxabyy";
    auto in = Input::of(data);
    auto p = local(str_p({'a', 'b'}), 2, 4);
    auto r = p(in, State{0, 6, 0});
    REQUIRE(r.has_value());
    CHECK(r->second == State{0, 6, 4});  // outer interval back, pos after window

    // Relative addressing: the window is offset by the outer left end.
    auto r3 = local(str_p({'b', 'y'}), 1, 3)(in, State{2, 6, 2});
    REQUIRE(r3.has_value());
    CHECK(r3->second == State{2, 6, 5});

    // Bounds are checked against the outer interval.
    CHECK_FALSE(local(str_p({'y'}), 4, 7)(in, State{0, 6, 0}).has_value());
    CHECK_FALSE(local(str_p({'x'}), -1, 1)(in, State{0, 6, 0}).has_value());
    // Empty windows are rejected like set_interval rejects them.
    CHECK_FALSE(local(unit(Unit{}), 2, 2)(in, State{0, 6, 0}).has_value());
}

TEST_CASE("parsers never read outside the current interval") {
    std::string data = "aaaa";
    auto in = Input::of(data);
    // char_p at the right edge fails even though the byte exists.
    CHECK_FALSE(char_p('a')(in, State{0, 2, 2}).has_value());
    CHECK_FALSE(char_p('a')(in, State{1, 1, 1}).has_value());
    // str_p may not run past r.
    CHECK_FALSE(str_p({'a', 'a', 'a'})(in, State{0, 2, 0}).has_value());
    // arr composes the same bound.
    CHECK_FALSE(arr(3, char_p('a'))(in, State{0, 2, 0}).has_value());
    auto ok = arr(2, char_p('a'))(in, State{0, 2, 0});
    REQUIRE(ok.has_value());
    CHECK(ok->first == std::vector<std::uint8_t>{'a', 'a'});
}

TEST_CASE("alt is biased and backtracks the state") {
    std::string data = "ab";
    auto in = Input::of(data);
    auto p = alt<I64>(map(str_p({'a', 'x'}), [](Unit) { return I64{1}; }),
                      map(str_p({'a', 'b'}), [](Unit) { return I64{2}; }));
    auto r = p(in, State{0, 2, 0});
    REQUIRE(r.has_value());
    CHECK(r->first == 2);
    CHECK(r->second.c == 2);
}

TEST_CASE("combinator numeral parser agrees with the grammar engine") {
    auto gr = ipg::load_grammar(testutil::read_file(
        testutil::corpus_path("grammars/numeral.ipg")));
    REQUIRE(gr.ok());
    auto p = int_p();

    // Every string over {0,1} up to length 12, plus a sprinkle of junk bytes.
    std::vector<std::string> cases = {"", "2", "x", "0x", "x0", "10x", "1x0"};
    for (int len = 1; len <= 12; ++len)
        for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
            std::string s;
            for (int i = 0; i < len; ++i) s += "01"[(bits >> i) & 1];
            cases.push_back(s);
        }

    for (const auto& s : cases) {
        auto engine = ipg::parse(s, gr.grammar, "Int");
        auto comb = p(Input::of(s), State{0, static_cast<I64>(s.size()), 0});
        REQUIRE_MESSAGE(engine.success == comb.has_value(),
                        "acceptance mismatch on: ", s);
        if (engine.success)
            CHECK_MESSAGE(engine.tree->env.at("val") == comb->first,
                          "value mismatch on: ", s);
    }
}
