#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ipg/ast.hpp"
#include "ipg/diagnostics.hpp"

namespace ipg {

// def(A): attributes guaranteed defined by every alternative of A.
// Local rules are keyed as "Outer.Local". start and end are implicit in
// every set; EOI never appears.
struct DefSets {
    std::map<std::string, std::set<std::string>> by_name;
};

// Lexical rule resolution: the chain of rules enclosing a reference site,
// innermost first, used to resolve nonterminal names (locals shadow globals).
struct RuleScope {
    const Grammar* grammar = nullptr;
    std::vector<const Rule*> chain;  // innermost rule first

    // Resolved target of a nonterminal name.
    struct Target {
        enum class Kind { None, Rule, Builtin, External } kind = Kind::None;
        const Rule* rule = nullptr;       // Kind::Rule
        std::string qualified_name;       // "A" or "Outer.Local"; builtins/externals: name
        bool is_local = false;
    };
    Target resolve(const std::string& name) const;
};

// Which in-alternative term a qualified/indexed reference binds to:
// the nearest preceding term for that nonterminal, else a unique
// occurrence anywhere in the alternative. Returns -1 when unbound.
// before_index < 0 means "consider the whole alternative".
int resolve_nt_term(const Alternative& alt, int before_index, const std::string& name);

// Whether a term mentions nonterminal `name` (NT target, array element,
// or any switch branch).
bool term_binds_nt(const Term& t, const std::string& name);

DefSets compute_def_sets(const Grammar& g);

Diagnostics check_references(const Grammar& g, const DefSets& defs);

struct CheckResult {
    Grammar grammar;  // eval_order filled on every alternative
    Diagnostics diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

// Builds per-alternative dependency graphs, rejects cycles (CYCLIC_ATTRS),
// and fills eval_order with a stable topological order.
CheckResult check_and_reorder(const Grammar& g, const DefSets& defs);

// Full front-to-back pipeline: parse -> validate -> complete ->
// def sets -> references -> reorder. Used by the CLI and tests.
struct PipelineResult {
    Grammar grammar;
    Diagnostics diagnostics;
    DefSets def_sets;
    int fully_omitted_intervals = 0;
    int length_only_intervals = 0;
    bool ok() const { return diagnostics.empty(); }
};

PipelineResult load_grammar(const SourceText& src);
PipelineResult load_grammar(const std::string& text);

}  // namespace ipg
