#include "ipg/ast.hpp"

#include <algorithm>
#include <set>

namespace ipg {

const char* binop_token(BinOpKind op) {
    switch (op) {
        case BinOpKind::Add: return "+";
        case BinOpKind::Sub: return "-";
        case BinOpKind::Mul: return "*";
        case BinOpKind::Div: return "/";
        case BinOpKind::Mod: return "mod";
        case BinOpKind::Eq: return "==";
        case BinOpKind::Ne: return "!=";
        case BinOpKind::Lt: return "<";
        case BinOpKind::Gt: return ">";
        case BinOpKind::Le: return "<=";
        case BinOpKind::Ge: return ">=";
        case BinOpKind::And: return "&&";
        case BinOpKind::Or: return "||";
        case BinOpKind::Shl: return "<<";
        case BinOpKind::Shr: return ">>";
        case BinOpKind::BitAnd: return "&";
        case BinOpKind::BitOr: return "|";
    }
    return "?";
}

Ref Ref::bare(std::string id) {
    Ref r;
    r.kind = Kind::Bare;
    r.id = std::move(id);
    return r;
}
Ref Ref::qual(std::string nt, std::string id) {
    Ref r;
    r.kind = Kind::Qual;
    r.nt = std::move(nt);
    r.id = std::move(id);
    return r;
}
Ref Ref::indexed(std::string nt, ExprPtr index, std::string id) {
    Ref r;
    r.kind = Kind::Indexed;
    r.nt = std::move(nt);
    r.index = std::move(index);
    r.id = std::move(id);
    return r;
}
Ref Ref::eoi() {
    Ref r;
    r.kind = Kind::EOI;
    return r;
}
Ref Ref::qual_start(std::string nt) {
    Ref r;
    r.kind = Kind::QualStart;
    r.nt = std::move(nt);
    return r;
}
Ref Ref::qual_end(std::string nt) {
    Ref r;
    r.kind = Kind::QualEnd;
    r.nt = std::move(nt);
    return r;
}
Ref Ref::indexed_start(std::string nt, ExprPtr index) {
    Ref r;
    r.kind = Kind::IndexedStart;
    r.nt = std::move(nt);
    r.index = std::move(index);
    return r;
}
Ref Ref::indexed_end(std::string nt, ExprPtr index) {
    Ref r;
    r.kind = Kind::IndexedEnd;
    r.nt = std::move(nt);
    r.index = std::move(index);
    return r;
}

ExprPtr Expr::int_lit(std::int64_t v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::IntLit;
    e->value = v;
    return e;
}
ExprPtr Expr::binop(BinOpKind op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::BinOp;
    e->op = op;
    e->a = std::move(lhs);
    e->b = std::move(rhs);
    return e;
}
ExprPtr Expr::cond(ExprPtr c, ExprPtr t, ExprPtr f) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Cond;
    e->a = std::move(c);
    e->b = std::move(t);
    e->c = std::move(f);
    return e;
}
ExprPtr Expr::exists(std::string binder, ExprPtr c, ExprPtr t, ExprPtr f) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Exists;
    e->binder = std::move(binder);
    e->a = std::move(c);
    e->b = std::move(t);
    e->c = std::move(f);
    return e;
}
ExprPtr Expr::make_ref(Ref r) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Ref;
    e->ref = std::move(r);
    return e;
}

ExprPtr Expr::folded_add(ExprPtr lhs, std::int64_t n) {
    return folded_add(std::move(lhs), int_lit(n));
}

ExprPtr Expr::folded_add(ExprPtr lhs, ExprPtr rhs) {
    if (lhs->kind == Kind::IntLit && rhs->kind == Kind::IntLit)
        return int_lit(lhs->value + rhs->value);
    if (lhs->kind == Kind::IntLit && lhs->value == 0) return rhs;
    if (rhs->kind == Kind::IntLit && rhs->value == 0) return lhs;
    return binop(BinOpKind::Add, std::move(lhs), std::move(rhs));
}

Interval Interval::missing() { return {}; }
Interval Interval::length_only(ExprPtr len) {
    Interval iv;
    iv.kind = Kind::LengthOnly;
    iv.lo = std::move(len);
    return iv;
}
Interval Interval::full(ExprPtr lo, ExprPtr hi) {
    Interval iv;
    iv.kind = Kind::Full;
    iv.lo = std::move(lo);
    iv.hi = std::move(hi);
    return iv;
}

const Rule* Grammar::find_rule(const std::string& name) const {
    for (const auto& r : rules)
        if (r.name == name) return &r;
    return nullptr;
}

const ExternalDecl* Grammar::find_external(const std::string& name) const {
    for (const auto& e : externals)
        if (e.name == name) return &e;
    return nullptr;
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {
        "Byte",     "UInt16LE", "UInt32LE", "UInt64LE",
        "UInt16BE", "UInt32BE", "AsciiInt", "Raw",
    };
    return names;
}

bool is_builtin_name(const std::string& name) {
    const auto& b = builtin_names();
    return std::find(b.begin(), b.end(), name) != b.end();
}

// ---------------------------------------------------------------------------
// Structural equality

static bool equal_ptr(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return equal(*a, *b);
}

static bool equal(const Ref& a, const Ref& b) {
    return a.kind == b.kind && a.nt == b.nt && a.id == b.id &&
           equal_ptr(a.index, b.index);
}

bool equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Expr::Kind::IntLit: return a.value == b.value;
        case Expr::Kind::BinOp:
            return a.op == b.op && equal_ptr(a.a, b.a) && equal_ptr(a.b, b.b);
        case Expr::Kind::Cond:
            return equal_ptr(a.a, b.a) && equal_ptr(a.b, b.b) && equal_ptr(a.c, b.c);
        case Expr::Kind::Exists:
            return a.binder == b.binder && equal_ptr(a.a, b.a) &&
                   equal_ptr(a.b, b.b) && equal_ptr(a.c, b.c);
        case Expr::Kind::Ref: return equal(a.ref, b.ref);
    }
    return false;
}

static bool equal(const Interval& a, const Interval& b) {
    return a.kind == b.kind && equal_ptr(a.lo, b.lo) && equal_ptr(a.hi, b.hi);
}

static bool equal(const SwitchBranch& a, const SwitchBranch& b) {
    return equal_ptr(a.cond, b.cond) && a.name == b.name &&
           equal(a.interval, b.interval);
}

bool equal(const Term& a, const Term& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Term::Kind::NT:
            return a.name == b.name && equal(a.interval, b.interval);
        case Term::Kind::Terminal:
            return a.bytes == b.bytes && equal(a.interval, b.interval);
        case Term::Kind::AttrDef:
            return a.name == b.name && equal_ptr(a.expr, b.expr);
        case Term::Kind::Predicate:
            return equal_ptr(a.expr, b.expr);
        case Term::Kind::ForArray:
            return a.name == b.name && equal_ptr(a.from, b.from) &&
                   equal_ptr(a.to, b.to) && a.elem_name == b.elem_name &&
                   equal(a.elem_interval, b.elem_interval);
        case Term::Kind::Switch: {
            if (a.branches.size() != b.branches.size()) return false;
            for (std::size_t i = 0; i < a.branches.size(); ++i)
                if (!equal(a.branches[i], b.branches[i])) return false;
            return equal(a.default_branch, b.default_branch);
        }
    }
    return false;
}

static bool equal(const Rule& a, const Rule& b) {
    if (a.name != b.name || a.alternatives.size() != b.alternatives.size() ||
        a.locals.size() != b.locals.size())
        return false;
    for (std::size_t i = 0; i < a.alternatives.size(); ++i) {
        const auto& x = a.alternatives[i];
        const auto& y = b.alternatives[i];
        if (x.terms.size() != y.terms.size()) return false;
        for (std::size_t j = 0; j < x.terms.size(); ++j)
            if (!equal(x.terms[j], y.terms[j])) return false;
    }
    for (std::size_t i = 0; i < a.locals.size(); ++i)
        if (!equal(a.locals[i], b.locals[i])) return false;
    return true;
}

bool equal(const Grammar& a, const Grammar& b) {
    if (a.rules.size() != b.rules.size() ||
        a.externals.size() != b.externals.size() || a.start != b.start)
        return false;
    for (std::size_t i = 0; i < a.externals.size(); ++i)
        if (a.externals[i].name != b.externals[i].name ||
            a.externals[i].attrs != b.externals[i].attrs)
            return false;
    for (std::size_t i = 0; i < a.rules.size(); ++i)
        if (!equal(a.rules[i], b.rules[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
  public:
    explicit Validator(const Grammar& g) : g_(g) {
        for (const auto& r : g.rules) global_names_.insert(r.name);
        for (const auto& e : g.externals) external_names_.insert(e.name);
    }

    Diagnostics run() {
        std::set<std::string> seen;
        for (const auto& r : g_.rules) {
            if (!seen.insert(r.name).second)
                error("DUP_RULE", "duplicate rule for nonterminal '" + r.name + "'", r.span);
            std::set<std::string> local_seen;
            for (const auto& l : r.locals)
                if (!local_seen.insert(l.name).second)
                    error("DUP_RULE",
                          "duplicate local rule '" + l.name + "' in rule '" + r.name + "'",
                          l.span);
        }
        for (const auto& r : g_.rules) check_rule(r, &r);
        if (!g_.start.empty() && !global_names_.count(g_.start))
            error("UNDEF_NT", "start nonterminal '" + g_.start + "' is not defined", Span{});
        return std::move(diags_);
    }

  private:
    void error(const char* code, std::string msg, Span span) {
        diags_.push_back({code, std::move(msg), span});
    }

    bool resolves(const std::string& name, const Rule* enclosing_global) const {
        if (enclosing_global)
            for (const auto& l : enclosing_global->locals)
                if (l.name == name) return true;
        return global_names_.count(name) || is_builtin_name(name) ||
               external_names_.count(name) > 0;
    }

    void check_name(const std::string& name, Span span, const Rule* enclosing_global) {
        if (!resolves(name, enclosing_global))
            error("UNDEF_NT", "undefined nonterminal '" + name + "'", span);
    }

    void check_rule(const Rule& r, const Rule* enclosing_global) {
        if (r.alternatives.empty())
            error("EMPTY_ALT", "rule '" + r.name + "' has no alternatives", r.span);
        for (const auto& alt : r.alternatives) {
            if (alt.terms.empty())
                error("EMPTY_ALT", "empty alternative in rule '" + r.name + "'", alt.span);
            for (const auto& t : alt.terms) check_term(t, enclosing_global);
        }
        for (const auto& l : r.locals) check_rule(l, enclosing_global);
    }

    void check_term(const Term& t, const Rule* enclosing_global) {
        switch (t.kind) {
            case Term::Kind::NT:
                check_name(t.name, t.span, enclosing_global);
                break;
            case Term::Kind::ForArray:
                check_name(t.elem_name, t.span, enclosing_global);
                break;
            case Term::Kind::Switch:
                for (const auto& br : t.branches)
                    check_name(br.name, t.span, enclosing_global);
                check_name(t.default_branch.name, t.span, enclosing_global);
                break;
            case Term::Kind::AttrDef:
                if (t.name == "EOI" || t.name == "start" || t.name == "end")
                    error("RESERVED_NAME",
                          "attribute name '" + t.name + "' is reserved", t.span);
                break;
            default:
                break;
        }
    }

    const Grammar& g_;
    std::set<std::string> global_names_;
    std::set<std::string> external_names_;
    Diagnostics diags_;
};

}  // namespace

Diagnostics validate_ast(const Grammar& g) { return Validator(g).run(); }

}  // namespace ipg
