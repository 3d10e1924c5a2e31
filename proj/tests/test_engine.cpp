#include <cmath>
#include <string>

#include "doctest.h"
#include "ipg/check.hpp"
#include "ipg/engine.hpp"
#include "ipg/frontend.hpp"
#include "test_util.hpp"

using namespace ipg;

namespace {

Grammar load(const std::string& text) {
    auto r = load_grammar(text);
    REQUIRE_MESSAGE(r.ok(), (r.diagnostics.empty() ? std::string() : r.diagnostics[0].message));
    return r.grammar;
}

Grammar load_corpus(const std::string& name) {
    return load(testutil::read_file(testutil::corpus_path("grammars/" + name + ".ipg")));
}

bool accepts(const Grammar& g, const std::string& in, const std::string& start = "") {
    return parse(in, g, start).success;
}

// Independent oracle for the anchored aa...bb language.
bool oracle_anchor(const std::string& s) {
    return s.size() >= 4 && s.substr(0, 2) == "aa" && s.substr(s.size() - 2) == "bb";
}

}  // namespace

TEST_CASE("builtins: integer readers, AsciiInt, Raw") {
    auto g = load("S -> UInt32LE[0, 4] {a = UInt32LE.val};");
    std::vector<std::uint8_t> in{5, 0, 0, 0};
    auto out = parse(in, g, "");
    REQUIRE(out.success);
    CHECK(out.tree->env.at("a") == 5);

    auto g2 = load("S -> UInt16BE[0, EOI];");
    CHECK_FALSE(parse(std::string("x"), g2, "").success);  // short slice

    auto g3 = load("S -> AsciiInt[0, EOI] {v = AsciiInt.val};");
    auto o3 = parse(std::string("42x"), g3, "");
    REQUIRE(o3.success);
    CHECK(o3.tree->env.at("v") == 42);
    CHECK(o3.tree->children[0]->env.at("end") == 2);  // consumed "42"
    CHECK_FALSE(parse(std::string("x42"), g3, "").success);

    auto g4 = load("S -> UInt16BE[0, 2] {v = UInt16BE.val};");
    std::vector<std::uint8_t> be{0x01, 0x02};
    auto o4 = parse(be, g4, "");
    REQUIRE(o4.success);
    CHECK(o4.tree->env.at("v") == 0x0102);
}

TEST_CASE("anchor agrees with the brute-force oracle") {
    auto g = load_corpus("anchor");
    CHECK(accepts(g, "aabb"));
    CHECK(accepts(g, "aaXYbb"));
    CHECK_FALSE(accepts(g, "aab"));
    CHECK_FALSE(accepts(g, "abbb"));
    CHECK_FALSE(accepts(g, "aa"));
    testutil::Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        auto len = rng.below(8);
        for (std::uint64_t j = 0; j < len; ++j)
            s += "ab"[rng.below(2)];
        CHECK_MESSAGE(accepts(g, s) == oracle_anchor(s), "disagreement on: ", s);
    }
}

TEST_CASE("numeral computes the numeral value") {
    auto g = load_corpus("numeral");
    for (std::uint64_t v : {0ull, 1ull, 2ull, 5ull, 6ull, 255ull, 4095ull}) {
        std::string s;
        std::uint64_t x = v;
        do {
            s = char('0' + (x & 1)) + s;
            x >>= 1;
        } while (x);
        auto out = parse(s, g, "Int");
        REQUIRE(out.success);
        CHECK(out.tree->env.at("val") == static_cast<std::int64_t>(v));
    }
    CHECK_FALSE(accepts(g, "", "Int"));
    CHECK_FALSE(accepts(g, "2", "Int"));
}

TEST_CASE("endchain: end attribute chaining and the k+1 walkthrough") {
    auto g = load_corpus("endchain");
    for (int k : {0, 1, 3, 17, 50}) {
        std::string s = "1" + std::string(static_cast<std::size_t>(k), '0') + "stop";
        auto out = parse(s, g, "");
        REQUIRE_MESSAGE(out.success, "rejected k=", k);
        const Tree* o_node = nullptr;
        for (const auto& c : out.tree->children)
            if (c->kind == Tree::Kind::Node && c->nt == "O") o_node = c.get();
        REQUIRE(o_node != nullptr);
        CHECK(o_node->env.at("end") == k + 1);
    }
    CHECK_FALSE(accepts(g, "1000stoq"));
    CHECK_FALSE(accepts(g, "000stop"));
    CHECK_FALSE(accepts(g, "1000sto"));
}

TEST_CASE("anbncn accepts exactly the language") {
    auto g = load_corpus("anbncn");
    auto word = [](int a, int b, int c) {
        return std::string(static_cast<std::size_t>(a), 'a') +
               std::string(static_cast<std::size_t>(b), 'b') +
               std::string(static_cast<std::size_t>(c), 'c');
    };
    for (int n = 1; n <= 12; ++n) CHECK(accepts(g, word(n, n, n)));
    CHECK_FALSE(accepts(g, ""));
    CHECK_FALSE(accepts(g, word(2, 2, 1)));
    CHECK_FALSE(accepts(g, word(1, 2, 3)));
    CHECK_FALSE(accepts(g, "abcabc"));
    CHECK_FALSE(accepts(g, "aabbc"));
}

TEST_CASE("exists stops at the first satisfying element") {
    auto g = load(
        "S -> for i = 0 to 2 do Num[i, i + 1]"
        " {x = exists j . Num(j).val == 48 ? j : 0 - 1};\n"
        "Num -> Byte[0, 1] {val = Byte.val};");
    auto out = parse(std::string("10"), g, "");  // vals are '1','0' = 49,48
    REQUIRE(out.success);
    CHECK(out.tree->env.at("x") == 1);
    auto out2 = parse(std::string("11"), g, "");
    REQUIRE(out2.success);
    CHECK(out2.tree->env.at("x") == -1);
}

TEST_CASE("evaluation faults fail the alternative softly") {
    auto g = load(
        "S -> {x = 1 / 0} Raw[0, EOI] / {ok = 1} Raw[0, EOI];");
    auto out = parse(std::string("z"), g, "");
    REQUIRE(out.success);
    CHECK(out.tree->env.count("ok") == 1);

    EngineOptions strict;
    strict.strict_eval = true;
    CHECK_THROWS_AS(parse(std::string("z"), g, "", strict), StrictEvalError);
}

TEST_CASE("array index out of range is a soft fault") {
    auto g = load(
        "S -> for i = 0 to 1 do Num[i, i + 1] {x = Num(5).val} / {y = 1} Raw[0, EOI];\n"
        "Num -> Byte[0, 1] {val = Byte.val};");
    auto out = parse(std::string("a"), g, "");
    REQUIRE(out.success);
    CHECK(out.tree->env.count("y") == 1);
}

TEST_CASE("zero-iteration arrays impose no constraints") {
    auto g = load("S -> for i = 5 to 2 do Num[i, i + 1] {z = 7};\n"
                  "Num -> Byte[0, 1] {val = Byte.val};");
    auto out = parse(std::string("anything"), g, "");
    REQUIRE(out.success);
    CHECK(out.tree->env.at("z") == 7);
    CHECK(out.tree->env.at("end") == 0);  // nothing touched
}

TEST_CASE("switch takes the first true branch, no fallthrough") {
    auto g = load(
        "S -> Byte[0, 1] switch( Byte.val == 97 : A[1, 2] / Byte.val > 0 : B[1, 2] / default : C[1, 2] );\n"
        "A -> \"x\"[0, 1];\nB -> \"y\"[0, 1];\nC -> Raw[0, EOI];");
    CHECK(accepts(g, "ax"));
    CHECK_FALSE(accepts(g, "ay"));  // first branch selected and failed: no fallthrough
    CHECK(accepts(g, "by"));
    CHECK_FALSE(accepts(g, "bx"));
}

TEST_CASE("depth guard raises a hard error") {
    auto g = load_corpus("nonterm_valuedriven");
    EngineOptions opts;
    opts.max_depth = 64;
    CHECK_THROWS_AS(parse(std::string("0"), g, "", opts), DepthExceededError);
}

TEST_CASE("blackbox registration and contract checking") {
    auto reg = BlackboxRegistry::with_builtins();
    CHECK_FALSE(reg.add("Byte", nullptr));  // duplicate
    REQUIRE(reg.add("TagByte", [](const std::uint8_t* p, std::size_t n) {
        BlackboxResult r;
        if (n < 1) return r;
        r.ok = true;
        r.consumed_end = 1;
        r.attrs["tag"] = p[0];
        return r;
    }));
    auto g = load("external TagByte(tag);\nS -> TagByte[0, EOI] {t = TagByte.tag};");
    auto out = parse(std::string("Q"), g, "", {}, &reg);
    REQUIRE(out.success);
    CHECK(out.tree->env.at("t") == 'Q');

    BlackboxRegistry bad;
    bad.add("TagByte", [](const std::uint8_t*, std::size_t n) {
        BlackboxResult r;
        r.ok = true;
        r.consumed_end = n + 5;  // out of range
        return r;
    });
    CHECK_THROWS_AS(parse(std::string("Q"), g, "", {}, &bad), BlackboxContractError);
}

TEST_CASE("memo transparency over the corpus") {
    auto manifest = testutil::read_file(testutil::corpus_path("manifest.json"));
    // Compare memo on/off on every corpus fixture that parses normally.
    struct Case {
        const char* grammar;
        const char* input;
        const char* start;
    };
    const Case cases[] = {
        {"anchor", "anchor_aabb.bin", "S"},
        {"anchor", "anchor_aab.bin", "S"},
        {"offlen", "offlen.bin", "S"},
        {"numeral", "numeral_101.bin", "Int"},
        {"endchain", "endchain_1000stop.bin", "S"},
        {"counted", "counted.bin", "S"},
        {"anbncn", "anbncn_aabbcc.bin", "S"},
        {"anbncn", "anbncn_aabbc.bin", "S"},
        {"elf_subset", "elf.bin", "ELF"},
        {"gif_subset", "gif_7block.bin", "GIF"},
        {"pdf_bnum", "pdf_bnum_317.bin", "bNum"},
        {"pdf_twopass", "pdf_twopass.bin", "S"},
    };
    (void)manifest;
    for (const auto& c : cases) {
        auto g = load_corpus(c.grammar);
        auto in = testutil::read_bytes(testutil::corpus_path("fixtures/" + std::string(c.input)));
        EngineOptions memo_on, memo_off;
        memo_off.memo = false;
        auto a = parse(in, g, c.start, memo_on);
        auto b = parse(in, g, c.start, memo_off);
        CHECK(a.success == b.success);
        if (a.success) CHECK_MESSAGE(tree_equal(a.tree, b.tree), "memo mismatch: ", c.grammar);
    }
}

TEST_CASE("evaluation order does not change the outcome") {
    // Textual order vs computed topological order produce identical trees.
    auto r = load_grammar(
        "A -> B1[0, B2.a] B2[a1, EOI] {a1=2};\n"
        "B1 -> Raw[0, EOI];\n"
        "B2 -> {a = 3} Raw[0, EOI];\n");
    REQUIRE(r.ok());
    auto g1 = r.grammar;
    auto g2 = r.grammar;
    // A different valid topological order: keep the computed one in g1 and
    // use another valid order (2,1,0 is computed; it is the only valid one
    // here, so instead check against an equivalent reordering of a free rule).
    auto free_rule = load_grammar("S -> {a = 1} {b = 2} Raw[0, EOI];");
    REQUIRE(free_rule.ok());
    auto ga = free_rule.grammar;
    auto gb = free_rule.grammar;
    gb.rules[0].alternatives[0].eval_order = {1, 0, 2};  // also valid: no deps
    auto oa = parse(std::string("q"), ga, "");
    auto ob = parse(std::string("q"), gb, "");
    REQUIRE(oa.success);
    REQUIRE(ob.success);
    CHECK(tree_equal(oa.tree, ob.tree));
    auto o1 = parse(std::string("xyz"), g1, "");
    auto o2 = parse(std::string("xyz"), g2, "");
    CHECK(o1.success == o2.success);
}

TEST_CASE("memoized invocation growth is at most quadratic") {
    auto g = load_corpus("numeral");
    testutil::Rng rng(7);
    double max_slope = 0;
    std::uint64_t prev_count = 0;
    std::size_t prev_n = 0;
    for (std::size_t n : {64, 128, 256, 512, 1024, 2048, 4096}) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) s += "01"[rng.below(2)];
        auto out = parse(s, g, "Int");
        REQUIRE(out.success);
        if (prev_n) {
            double slope = std::log(double(out.stats.invocations) / double(prev_count)) /
                           std::log(double(n) / double(prev_n));
            max_slope = std::max(max_slope, slope);
        }
        prev_count = out.stats.invocations;
        prev_n = n;
    }
    CHECK(max_slope <= 2.1);
}

TEST_CASE("start/end monotonic bookkeeping on nested windows") {
    auto g = load("S -> \"b\"[2, 3] \"a\"[0, 1];");
    auto out = parse(std::string("axb"), g, "");
    REQUIRE(out.success);
    CHECK(out.tree->env.at("start") == 0);
    CHECK(out.tree->env.at("end") == 3);
}

TEST_CASE("empty terminal matches without touching") {
    auto g = load("S -> \"\"[0, 1] {z = 1};");
    auto out = parse(std::string("x"), g, "");
    REQUIRE(out.success);
    CHECK(out.tree->env.at("end") == 0);
    CHECK(out.tree->env.at("start") == 1);  // |s|, untouched
}
