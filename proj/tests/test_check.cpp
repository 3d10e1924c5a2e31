#include <string>

#include "doctest.h"
#include "ipg/check.hpp"
#include "ipg/frontend.hpp"
#include "test_util.hpp"

using namespace ipg;

namespace {

PipelineResult must_load(const std::string& text) {
    auto r = load_grammar(text);
    REQUIRE_MESSAGE(r.ok(), (r.diagnostics.empty() ? std::string() : r.diagnostics[0].message));
    return r;
}

bool has_code(const Diagnostics& ds, const std::string& code) {
    for (const auto& d : ds)
        if (d.code == code) return true;
    return false;
}

}  // namespace

TEST_CASE("def sets intersect over alternatives and include start/end") {
    auto r = must_load(
        "S -> {a = 1} {b = 2} Raw[0, EOI] / {a = 3} Raw[0, EOI];\n");
    const auto& d = r.def_sets.by_name.at("S");
    CHECK(d.count("a") == 1);
    CHECK(d.count("b") == 0);  // not defined by the second alternative
    CHECK(d.count("start") == 1);
    CHECK(d.count("end") == 1);
    CHECK(d.count("EOI") == 0);
    // Builtins expose val (except Raw).
    CHECK(r.def_sets.by_name.at("Byte").count("val") == 1);
    CHECK(r.def_sets.by_name.at("Raw").count("val") == 0);
}

TEST_CASE("locals get qualified def-set keys") {
    auto r = must_load("A -> L[0, EOI] where L -> {x = 1} Raw[0, EOI];\n");
    CHECK(r.def_sets.by_name.at("A.L").count("x") == 1);
}

TEST_CASE("reordering the backward-dependency example") {
    auto r = must_load(
        "A -> B1[0, B2.a] B2[a1, EOI] {a1=2};\n"
        "B1 -> Raw[0, EOI];\n"
        "B2 -> {a = 1} Raw[0, EOI];\n");
    const auto& alt = r.grammar.rules[0].alternatives[0];
    REQUIRE(alt.eval_order == std::vector<int>{2, 1, 0});
    CHECK(pretty_print_alternative(alt, true) == "{a1=2} B2[a1, EOI] B1[0, B2.a]");
    // Children stay in textual order.
    CHECK(pretty_print_alternative(alt, false) == "B1[0, B2.a] B2[a1, EOI] {a1=2}");
}

TEST_CASE("cyclic attribute dependencies are rejected") {
    auto r = load_grammar(
        "A -> B1[0, B2.a] B2[0, B1.b];\n"
        "B1 -> {b = 1} Raw[0, EOI];\n"
        "B2 -> {a = 1} Raw[0, EOI];\n");
    CHECK_FALSE(r.ok());
    CHECK(has_code(r.diagnostics, "CYCLIC_ATTRS"));
}

TEST_CASE("self-referential interval is a cycle") {
    auto r = load_grammar("A -> B[0, B.end];\nB -> Raw[0, EOI];\n");
    CHECK_FALSE(r.ok());
    CHECK(has_code(r.diagnostics, "CYCLIC_ATTRS"));
}

TEST_CASE("undefined attribute references are reported") {
    auto r = load_grammar("A -> B[0, EOI] {x = B.zzz};\nB -> {a = 1} Raw[0, EOI];\n");
    CHECK(has_code(r.diagnostics, "UNDEF_ATTR"));

    auto r2 = load_grammar("A -> {x = nope} Raw[0, EOI];\n");
    CHECK(has_code(r2.diagnostics, "UNDEF_BARE"));

    // Attribute defined in only one alternative is not in def(B).
    auto r3 = load_grammar(
        "A -> B[0, EOI] {x = B.a};\n"
        "B -> {a = 1} Raw[0, EOI] / Raw[0, EOI];\n");
    CHECK(has_code(r3.diagnostics, "UNDEF_ATTR"));
}

TEST_CASE("indexed references require an array and vice versa") {
    auto r = load_grammar("A -> B[0, EOI] {x = B(0).a};\nB -> {a = 1} Raw[0, EOI];\n");
    CHECK(has_code(r.diagnostics, "NOT_AN_ARRAY"));

    auto r2 = load_grammar(
        "A -> for i = 0 to 2 do B[i, i + 1] {x = B.a};\nB -> {a = 1} Byte[0, 1];\n");
    CHECK(has_code(r2.diagnostics, "NOT_AN_ARRAY"));
}

TEST_CASE("qualified references bind to the nearest preceding term") {
    auto g = must_load(
        "S -> A[0, 2] {x = A.v} A[2, 4] {y = A.v};\n"
        "A -> Byte[0, 1] {v = Byte.val};\n").grammar;
    const auto& alt = g.rules[0].alternatives[0];
    CHECK(resolve_nt_term(alt, 1, "A") == 0);
    CHECK(resolve_nt_term(alt, 3, "A") == 2);
    // Forward references work only when unambiguous.
    CHECK(resolve_nt_term(alt, 0, "A") == -1);
}

TEST_CASE("forward reference to a unique later term is allowed") {
    auto r = must_load(
        "S -> {x = A.v} A[0, 1];\n"
        "A -> Byte[0, 1] {v = Byte.val};\n");
    const auto& alt = r.grammar.rules[0].alternatives[0];
    // The attribute definition must evaluate after the term it reads.
    CHECK(alt.eval_order == std::vector<int>{1, 0});
}

TEST_CASE("locals may capture names from every invoking alternative") {
    auto r = must_load(
        "A -> {k = 1} L[0, EOI] where L -> {x = k} Raw[0, EOI];\n");
    CHECK(r.ok());

    // Capture fails if some invoking alternative lacks the name.
    auto bad = load_grammar(
        "A -> {k = 1} L[0, EOI] / L[0, EOI] where L -> {x = k} Raw[0, EOI];\n");
    CHECK(has_code(bad.diagnostics, "UNDEF_BARE"));
}

TEST_CASE("loop variables are visible to invoked locals") {
    auto r = load_grammar(testutil::read_file(
        testutil::corpus_path("grammars/elf_subset.ipg")));
    CHECK(r.ok());
}

TEST_CASE("whole corpus loads cleanly") {
    for (const char* name :
         {"anchor", "offlen", "numeral", "endchain", "counted", "anbncn", "elf_subset",
          "gif_subset", "pdf_bnum", "pdf_twopass", "nonterm_pingpong",
          "nonterm_valuedriven", "nonterm_emptyrec"}) {
        auto r = load_grammar(testutil::read_file(
            testutil::corpus_path("grammars/" + std::string(name) + ".ipg")));
        CHECK_MESSAGE(r.ok(), "load failed for ", name);
    }
}
