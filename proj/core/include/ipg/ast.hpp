#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ipg/diagnostics.hpp"

namespace ipg {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOpKind {
    Add, Sub, Mul, Div, Mod,
    Eq, Ne, Lt, Gt, Le, Ge,
    And, Or,
    Shl, Shr, BitAnd, BitOr,
};

const char* binop_token(BinOpKind op);

// Attribute reference forms.
struct Ref {
    enum class Kind {
        Bare,          // id
        Qual,          // A.id
        Indexed,       // A(e).id
        EOI,           // EOI
        QualStart,     // A.start
        QualEnd,       // A.end
        IndexedStart,  // A(e).start
        IndexedEnd,    // A(e).end
    };
    Kind kind = Kind::Bare;
    std::string nt;   // qualified forms
    std::string id;   // Bare / Qual / Indexed
    ExprPtr index;    // Indexed forms

    static Ref bare(std::string id);
    static Ref qual(std::string nt, std::string id);
    static Ref indexed(std::string nt, ExprPtr index, std::string id);
    static Ref eoi();
    static Ref qual_start(std::string nt);
    static Ref qual_end(std::string nt);
    static Ref indexed_start(std::string nt, ExprPtr index);
    static Ref indexed_end(std::string nt, ExprPtr index);
};

// Expressions evaluate to signed 64-bit integers; comparisons and logical
// operators yield 0 or 1.
struct Expr {
    enum class Kind { IntLit, BinOp, Cond, Exists, Ref };
    Kind kind = Kind::IntLit;

    std::int64_t value = 0;       // IntLit
    BinOpKind op = BinOpKind::Add;
    ExprPtr a, b, c;              // BinOp: a,b; Cond/Exists: a?b:c
    std::string binder;           // Exists loop variable
    Ref ref;                      // Ref

    static ExprPtr int_lit(std::int64_t v);
    static ExprPtr binop(BinOpKind op, ExprPtr lhs, ExprPtr rhs);
    static ExprPtr cond(ExprPtr c, ExprPtr t, ExprPtr e);
    static ExprPtr exists(std::string binder, ExprPtr c, ExprPtr t, ExprPtr e);
    static ExprPtr make_ref(Ref r);

    // Addition that folds integer literals, so auto-completed intervals
    // stay readable ("magic"[0, 5] rather than "magic"[0, 0 + 5]).
    static ExprPtr folded_add(ExprPtr lhs, std::int64_t n);
    static ExprPtr folded_add(ExprPtr lhs, ExprPtr rhs);
};

// Interval attached to a nonterminal/terminal occurrence.
struct Interval {
    enum class Kind { Missing, LengthOnly, Full };
    Kind kind = Kind::Missing;
    ExprPtr lo;  // Full: left endpoint; LengthOnly: the length expression
    ExprPtr hi;  // Full only

    static Interval missing();
    static Interval length_only(ExprPtr len);
    static Interval full(ExprPtr lo, ExprPtr hi);
};

struct SwitchBranch {
    ExprPtr cond;  // null for the default branch
    std::string name;
    Interval interval;
};

struct Term {
    enum class Kind { NT, Terminal, AttrDef, Predicate, ForArray, Switch };
    Kind kind = Kind::NT;
    Span span;

    std::string name;                  // NT name / attribute id / loop variable
    std::vector<std::uint8_t> bytes;   // Terminal literal (may be empty)
    Interval interval;                 // NT / Terminal
    ExprPtr expr;                      // AttrDef value / Predicate condition
    ExprPtr from, to;                  // ForArray bounds
    std::string elem_name;             // ForArray element nonterminal
    Interval elem_interval;            // ForArray element interval
    std::vector<SwitchBranch> branches;  // Switch conditional branches
    SwitchBranch default_branch;         // Switch default

    bool carries_interval() const {
        return kind == Kind::NT || kind == Kind::Terminal ||
               kind == Kind::ForArray || kind == Kind::Switch;
    }
};

struct Alternative {
    std::vector<Term> terms;
    // Permutation of term indices filled by check_and_reorder; empty means
    // textual order. Child order in parse trees always follows textual order.
    std::vector<int> eval_order;
    Span span;
};

struct Rule {
    std::string name;
    std::vector<Alternative> alternatives;
    std::vector<Rule> locals;  // where-clause rules, visible in all alternatives
    Span span;
};

struct ExternalDecl {
    std::string name;
    std::vector<std::string> attrs;
    Span span;
};

struct Grammar {
    std::vector<Rule> rules;
    std::vector<ExternalDecl> externals;
    std::string start;  // empty: first rule

    const Rule* find_rule(const std::string& name) const;
    const ExternalDecl* find_external(const std::string& name) const;
};

// Names of the engine's pre-registered builtin parsers.
bool is_builtin_name(const std::string& name);
const std::vector<std::string>& builtin_names();

// Structural equality, ignoring spans and eval_order.
bool equal(const Expr& a, const Expr& b);
bool equal(const Term& a, const Term& b);
bool equal(const Grammar& a, const Grammar& b);

Diagnostics validate_ast(const Grammar& g);

// Canonical surface syntax; parse_grammar(pretty_print(g)) == g structurally.
std::string pretty_print(const Grammar& g);
std::string pretty_print(const Expr& e);
std::string pretty_print(const Term& t);
std::string pretty_print_alternative(const Alternative& alt, bool in_eval_order = false);

}  // namespace ipg
