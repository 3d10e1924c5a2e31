#include <cctype>
#include <cstdio>
#include <string>

#include "ipg/ast.hpp"

namespace ipg {

namespace {

// Higher binds tighter. Ternary/exists sit at 0.
int binop_prec(BinOpKind op) {
    switch (op) {
        case BinOpKind::Or: return 1;
        case BinOpKind::And: return 2;
        case BinOpKind::Eq:
        case BinOpKind::Ne:
        case BinOpKind::Lt:
        case BinOpKind::Gt:
        case BinOpKind::Le:
        case BinOpKind::Ge: return 3;
        case BinOpKind::BitOr: return 4;
        case BinOpKind::BitAnd: return 5;
        case BinOpKind::Shl:
        case BinOpKind::Shr: return 6;
        case BinOpKind::Add:
        case BinOpKind::Sub: return 7;
        case BinOpKind::Mul:
        case BinOpKind::Div:
        case BinOpKind::Mod: return 8;
    }
    return 9;
}

std::string expr_str(const Expr& e, int min_prec);

std::string ref_str(const Ref& r) {
    switch (r.kind) {
        case Ref::Kind::Bare: return r.id;
        case Ref::Kind::Qual: return r.nt + "." + r.id;
        case Ref::Kind::Indexed:
            return r.nt + "(" + expr_str(*r.index, 0) + ")." + r.id;
        case Ref::Kind::EOI: return "EOI";
        case Ref::Kind::QualStart: return r.nt + ".start";
        case Ref::Kind::QualEnd: return r.nt + ".end";
        case Ref::Kind::IndexedStart:
            return r.nt + "(" + expr_str(*r.index, 0) + ").start";
        case Ref::Kind::IndexedEnd:
            return r.nt + "(" + expr_str(*r.index, 0) + ").end";
    }
    return "?";
}

std::string expr_str(const Expr& e, int min_prec) {
    switch (e.kind) {
        case Expr::Kind::IntLit: return std::to_string(e.value);
        case Expr::Kind::Ref: return ref_str(e.ref);
        case Expr::Kind::BinOp: {
            int p = binop_prec(e.op);
            std::string s = expr_str(*e.a, p) + " " + binop_token(e.op) + " " +
                            expr_str(*e.b, p + 1);
            if (p < min_prec) return "(" + s + ")";
            return s;
        }
        case Expr::Kind::Cond: {
            std::string s = expr_str(*e.a, 1) + " ? " + expr_str(*e.b, 0) +
                            " : " + expr_str(*e.c, 0);
            if (min_prec > 0) return "(" + s + ")";
            return s;
        }
        case Expr::Kind::Exists: {
            std::string s = "exists " + e.binder + " . " + expr_str(*e.a, 1) +
                            " ? " + expr_str(*e.b, 0) + " : " + expr_str(*e.c, 0);
            if (min_prec > 0) return "(" + s + ")";
            return s;
        }
    }
    return "?";
}

std::string bytes_str(const std::vector<std::uint8_t>& bytes) {
    std::string out = "\"";
    for (std::uint8_t b : bytes) {
        if (b == '"') {
            out += "\\\"";
        } else if (b == '\\') {
            out += "\\\\";
        } else if (b >= 0x20 && b < 0x7F) {
            out += static_cast<char>(b);
        } else {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\x%02x", b);
            out += buf;
        }
    }
    out += "\"";
    return out;
}

std::string interval_str(const Interval& iv) {
    switch (iv.kind) {
        case Interval::Kind::Missing: return "";
        case Interval::Kind::LengthOnly: return "[" + expr_str(*iv.lo, 0) + "]";
        case Interval::Kind::Full:
            return "[" + expr_str(*iv.lo, 0) + ", " + expr_str(*iv.hi, 0) + "]";
    }
    return "";
}

std::string branch_str(const SwitchBranch& br) {
    std::string s;
    if (br.cond)
        s += expr_str(*br.cond, 0) + " : ";
    else
        s += "default : ";
    s += br.name + interval_str(br.interval);
    return s;
}

std::string term_str(const Term& t) {
    switch (t.kind) {
        case Term::Kind::NT: return t.name + interval_str(t.interval);
        case Term::Kind::Terminal: return bytes_str(t.bytes) + interval_str(t.interval);
        case Term::Kind::AttrDef: return "{" + t.name + "=" + expr_str(*t.expr, 0) + "}";
        case Term::Kind::Predicate: return "{? " + expr_str(*t.expr, 0) + " }";
        case Term::Kind::ForArray:
            return "for " + t.name + " = " + expr_str(*t.from, 0) + " to " +
                   expr_str(*t.to, 0) + " do " + t.elem_name +
                   interval_str(t.elem_interval);
        case Term::Kind::Switch: {
            std::string s = "switch( ";
            for (const auto& br : t.branches) s += branch_str(br) + " / ";
            s += branch_str(t.default_branch) + " )";
            return s;
        }
    }
    return "?";
}

std::string alt_str(const Alternative& alt, bool in_eval_order) {
    std::string s;
    auto emit = [&](const Term& t) {
        if (!s.empty()) s += " ";
        s += term_str(t);
    };
    if (in_eval_order && !alt.eval_order.empty()) {
        for (int idx : alt.eval_order) emit(alt.terms[static_cast<std::size_t>(idx)]);
    } else {
        for (const auto& t : alt.terms) emit(t);
    }
    return s;
}

std::string rule_str(const Rule& r) {
    std::string s = r.name + " ->";
    for (std::size_t i = 0; i < r.alternatives.size(); ++i) {
        s += (i == 0) ? " " : " / ";
        s += alt_str(r.alternatives[i], false);
    }
    if (!r.locals.empty()) {
        s += " where";
        for (const auto& l : r.locals) s += " " + rule_str(l);
    }
    return s;
}

}  // namespace

std::string pretty_print(const Expr& e) { return expr_str(e, 0); }
std::string pretty_print(const Term& t) { return term_str(t); }

std::string pretty_print_alternative(const Alternative& alt, bool in_eval_order) {
    return alt_str(alt, in_eval_order);
}

std::string pretty_print(const Grammar& g) {
    std::string out;
    if (!g.start.empty()) out += "start " + g.start + ";\n";
    for (const auto& e : g.externals) {
        out += "external " + e.name;
        if (!e.attrs.empty()) {
            out += "(";
            for (std::size_t i = 0; i < e.attrs.size(); ++i) {
                if (i) out += ", ";
                out += e.attrs[i];
            }
            out += ")";
        }
        out += ";\n";
    }
    for (const auto& r : g.rules) out += rule_str(r) + ";\n";
    return out;
}

}  // namespace ipg
