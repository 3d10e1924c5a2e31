#include "ipg/check.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "ipg/frontend.hpp"

namespace ipg {

// ---------------------------------------------------------------------------
// Name resolution

RuleScope::Target RuleScope::resolve(const std::string& name) const {
    // Qualified names are built outermost-first: "Global.Local[.Nested]".
    auto qualified_at = [&](std::size_t chain_idx, const std::string& leaf) {
        std::string q;
        for (std::size_t i = chain.size(); i-- > chain_idx;) {
            q += chain[i]->name;
            q += ".";
        }
        return q + leaf;
    };
    for (std::size_t i = 0; i < chain.size(); ++i) {
        for (const auto& l : chain[i]->locals) {
            if (l.name == name) {
                Target t;
                t.kind = Target::Kind::Rule;
                t.rule = &l;
                t.qualified_name = qualified_at(i, name);
                t.is_local = true;
                return t;
            }
        }
    }
    if (grammar) {
        if (const Rule* r = grammar->find_rule(name)) {
            Target t;
            t.kind = Target::Kind::Rule;
            t.rule = r;
            t.qualified_name = name;
            return t;
        }
        if (is_builtin_name(name)) {
            Target t;
            t.kind = Target::Kind::Builtin;
            t.qualified_name = name;
            return t;
        }
        if (grammar->find_external(name)) {
            Target t;
            t.kind = Target::Kind::External;
            t.qualified_name = name;
            return t;
        }
    }
    return {};
}

bool term_binds_nt(const Term& t, const std::string& name) {
    switch (t.kind) {
        case Term::Kind::NT: return t.name == name;
        case Term::Kind::ForArray: return t.elem_name == name;
        case Term::Kind::Switch: {
            for (const auto& br : t.branches)
                if (br.name == name) return true;
            return t.default_branch.name == name;
        }
        default: return false;
    }
}

int resolve_nt_term(const Alternative& alt, int before_index, const std::string& name) {
    int n = static_cast<int>(alt.terms.size());
    if (before_index < 0 || before_index > n) before_index = n;
    for (int i = before_index - 1; i >= 0; --i)
        if (term_binds_nt(alt.terms[static_cast<std::size_t>(i)], name)) return i;
    // Forward references are allowed only for an unambiguous occurrence.
    int found = -1;
    for (int i = 0; i < n; ++i) {
        if (term_binds_nt(alt.terms[static_cast<std::size_t>(i)], name)) {
            if (found >= 0) return -1;
            found = i;
        }
    }
    return found;
}

// ---------------------------------------------------------------------------
// def sets

namespace {

void def_sets_for_rule(const Rule& r, const std::string& prefix, DefSets& out) {
    std::set<std::string> defs;
    bool first = true;
    for (const auto& alt : r.alternatives) {
        std::set<std::string> here;
        for (const auto& t : alt.terms)
            if (t.kind == Term::Kind::AttrDef) here.insert(t.name);
        if (first) {
            defs = std::move(here);
            first = false;
        } else {
            std::set<std::string> inter;
            std::set_intersection(defs.begin(), defs.end(), here.begin(), here.end(),
                                  std::inserter(inter, inter.begin()));
            defs = std::move(inter);
        }
    }
    defs.insert("start");
    defs.insert("end");
    out.by_name[prefix + r.name] = std::move(defs);
    for (const auto& l : r.locals) def_sets_for_rule(l, prefix + r.name + ".", out);
}

}  // namespace

DefSets compute_def_sets(const Grammar& g) {
    DefSets out;
    for (const auto& r : g.rules) def_sets_for_rule(r, "", out);
    for (const auto& name : builtin_names()) {
        std::set<std::string> defs = {"start", "end"};
        if (name != "Raw") defs.insert("val");
        out.by_name[name] = std::move(defs);
    }
    for (const auto& e : g.externals) {
        std::set<std::string> defs(e.attrs.begin(), e.attrs.end());
        defs.insert("start");
        defs.insert("end");
        out.by_name[e.name] = std::move(defs);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reference checking and reordering

namespace {

// Walks every Ref in an expression, tracking existential binders.
void walk_refs(const ExprPtr& e, std::vector<std::string>& binders,
               const std::function<void(const Ref&, const std::vector<std::string>&)>& fn) {
    if (!e) return;
    switch (e->kind) {
        case Expr::Kind::IntLit:
            return;
        case Expr::Kind::BinOp:
            walk_refs(e->a, binders, fn);
            walk_refs(e->b, binders, fn);
            return;
        case Expr::Kind::Cond:
            walk_refs(e->a, binders, fn);
            walk_refs(e->b, binders, fn);
            walk_refs(e->c, binders, fn);
            return;
        case Expr::Kind::Exists:
            binders.push_back(e->binder);
            walk_refs(e->a, binders, fn);
            walk_refs(e->b, binders, fn);
            binders.pop_back();
            walk_refs(e->c, binders, fn);
            return;
        case Expr::Kind::Ref:
            fn(e->ref, binders);
            if (e->ref.index) walk_refs(e->ref.index, binders, fn);
            return;
    }
}

// (expression, extra binders in scope) pairs for one term.
struct TermExpr {
    ExprPtr expr;
    std::vector<std::string> binders;
};

std::vector<TermExpr> term_exprs(const Term& t) {
    std::vector<TermExpr> out;
    auto add = [&](const ExprPtr& e, std::vector<std::string> b = {}) {
        if (e) out.push_back({e, std::move(b)});
    };
    auto add_interval = [&](const Interval& iv, std::vector<std::string> b = {}) {
        add(iv.lo, b);
        add(iv.hi, b);
    };
    switch (t.kind) {
        case Term::Kind::NT:
        case Term::Kind::Terminal:
            add_interval(t.interval);
            break;
        case Term::Kind::AttrDef:
        case Term::Kind::Predicate:
            add(t.expr);
            break;
        case Term::Kind::ForArray:
            add(t.from);
            add(t.to);
            add_interval(t.elem_interval, {t.name});
            break;
        case Term::Kind::Switch:
            for (const auto& br : t.branches) {
                add(br.cond);
                add_interval(br.interval);
            }
            add_interval(t.default_branch.interval);
            break;
    }
    return out;
}

// Nonterminal names a term may invoke.
std::vector<std::string> term_invoked_names(const Term& t) {
    switch (t.kind) {
        case Term::Kind::NT: return {t.name};
        case Term::Kind::ForArray: return {t.elem_name};
        case Term::Kind::Switch: {
            std::vector<std::string> names;
            for (const auto& br : t.branches) names.push_back(br.name);
            names.push_back(t.default_branch.name);
            return names;
        }
        default: return {};
    }
}

struct InvocationSite {
    const Alternative* alt;
    int term_index;
};

class Checker {
  public:
    Checker(const Grammar& g, const DefSets& defs) : g_(g), defs_(defs) {}

    Diagnostics check_references() {
        for (const auto& r : g_.rules) {
            RuleScope scope{&g_, {&r}};
            check_rule(r, scope);
        }
        return std::move(diags_);
    }

    // Fills eval_order on every alternative of `out` (same shape as g_).
    Diagnostics reorder(Grammar& out) {
        for (auto& r : out.rules) {
            RuleScope scope{&g_, {&r}};
            reorder_rule(r, scope);
        }
        return std::move(diags_);
    }

  private:
    void error(const char* code, std::string msg, Span span) {
        diags_.push_back({code, std::move(msg), span});
    }

    // Alternatives of `rule` that (transitively) invoke local `local`,
    // together with the direct invoking term index.
    std::vector<InvocationSite> invocation_sites(const Rule& rule, const Rule& local) {
        std::vector<InvocationSite> sites;
        // Local names reachable from `local` going backwards: start with the
        // local itself, then add any sibling local whose body invokes a name
        // already in the set.
        std::set<std::string> reaches = {local.name};
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& sib : rule.locals) {
                if (reaches.count(sib.name)) continue;
                bool invokes = false;
                std::function<void(const Rule&)> scan = [&](const Rule& r) {
                    for (const auto& alt : r.alternatives)
                        for (const auto& t : alt.terms)
                            for (const auto& n : term_invoked_names(t))
                                if (reaches.count(n)) invokes = true;
                    for (const auto& l : r.locals) scan(l);
                };
                scan(sib);
                if (invokes) {
                    reaches.insert(sib.name);
                    changed = true;
                }
            }
        }
        for (const auto& alt : rule.alternatives) {
            for (std::size_t i = 0; i < alt.terms.size(); ++i) {
                for (const auto& n : term_invoked_names(alt.terms[i]))
                    if (reaches.count(n))
                        sites.push_back({&alt, static_cast<int>(i)});
            }
        }
        return sites;
    }

    // Can a bare name be resolved inside alternative `alt` as seen from the
    // invocation site `site_idx` (attribute definition anywhere in the
    // alternative, or the loop variable of the invoking array term)?
    static bool bare_resolves_in(const Alternative& alt, int site_idx,
                                 const std::string& id) {
        for (const auto& t : alt.terms)
            if (t.kind == Term::Kind::AttrDef && t.name == id) return true;
        if (site_idx >= 0 && site_idx < static_cast<int>(alt.terms.size())) {
            const Term& t = alt.terms[static_cast<std::size_t>(site_idx)];
            if (t.kind == Term::Kind::ForArray && t.name == id) return true;
        }
        return false;
    }

    // Enclosing alternatives a local rule's free references may resolve
    // against: every alternative of the lexically enclosing rule that
    // transitively invokes this local.
    std::vector<InvocationSite> enclosing_sites(const RuleScope& scope) {
        if (scope.chain.size() < 2) return {};
        const Rule& local = *scope.chain[0];
        const Rule& encl = *scope.chain[1];
        auto sites = invocation_sites(encl, local);
        if (sites.empty()) {
            // Unreferenced local: fall back to all enclosing alternatives.
            for (const auto& alt : encl.alternatives) sites.push_back({&alt, -1});
        }
        return sites;
    }

    void check_defs_membership(const RuleScope& scope, const std::string& nt,
                               const std::string& id, Span span) {
        auto target = scope.resolve(nt);
        if (target.kind == RuleScope::Target::Kind::None) return;  // validate_ast reports
        auto it = defs_.by_name.find(target.qualified_name);
        if (it == defs_.by_name.end() || !it->second.count(id))
            error("UNDEF_ATTR",
                  "attribute '" + id + "' is not defined by every alternative of '" +
                      nt + "'",
                  span);
    }

    void check_ref(const Ref& ref, const std::vector<std::string>& binders,
                   const Alternative& alt, int term_index, const RuleScope& scope,
                   Span span) {
        auto in_binders = [&](const std::string& id) {
            return std::find(binders.begin(), binders.end(), id) != binders.end();
        };
        switch (ref.kind) {
            case Ref::Kind::EOI:
                return;
            case Ref::Kind::Bare: {
                if (in_binders(ref.id)) return;
                if (bare_resolves_in(alt, -1, ref.id)) return;
                // Local rules may capture names from the invoking alternative.
                RuleScope s = scope;
                while (s.chain.size() >= 2) {
                    bool everywhere = true;
                    auto sites = enclosing_sites(s);
                    for (const auto& site : sites)
                        if (!bare_resolves_in(*site.alt, site.term_index, ref.id))
                            everywhere = false;
                    if (!sites.empty() && everywhere) return;
                    s.chain.erase(s.chain.begin());
                }
                error("UNDEF_BARE", "unbound name '" + ref.id + "'", span);
                return;
            }
            case Ref::Kind::Qual:
            case Ref::Kind::QualStart:
            case Ref::Kind::QualEnd: {
                int j = resolve_nt_term(alt, term_index, ref.nt);
                if (j >= 0) {
                    const Term& t = alt.terms[static_cast<std::size_t>(j)];
                    if (t.kind == Term::Kind::ForArray) {
                        error("NOT_AN_ARRAY",
                              "'" + ref.nt + "' is an array; use an indexed reference " +
                                  ref.nt + "(e)...",
                              span);
                        return;
                    }
                    if (ref.kind == Ref::Kind::Qual)
                        check_defs_membership(scope, ref.nt, ref.id, span);
                    return;
                }
                // Try the enclosing alternatives (local-rule capture).
                RuleScope s = scope;
                while (s.chain.size() >= 2) {
                    auto sites = enclosing_sites(s);
                    bool everywhere = !sites.empty();
                    for (const auto& site : sites)
                        if (resolve_nt_term(*site.alt, site.term_index, ref.nt) < 0)
                            everywhere = false;
                    if (everywhere) {
                        RuleScope outer = s;
                        outer.chain.erase(outer.chain.begin());
                        if (ref.kind == Ref::Kind::Qual)
                            check_defs_membership(outer, ref.nt, ref.id, span);
                        return;
                    }
                    s.chain.erase(s.chain.begin());
                }
                error("UNDEF_ATTR",
                      "no term for nonterminal '" + ref.nt + "' is in scope", span);
                return;
            }
            case Ref::Kind::Indexed:
            case Ref::Kind::IndexedStart:
            case Ref::Kind::IndexedEnd: {
                RuleScope s = scope;
                const Alternative* a = &alt;
                int before = term_index;
                for (;;) {
                    int j = resolve_nt_term(*a, before, ref.nt);
                    if (j >= 0) {
                        const Term& t = a->terms[static_cast<std::size_t>(j)];
                        if (t.kind != Term::Kind::ForArray) {
                            error("NOT_AN_ARRAY",
                                  "indexed reference '" + ref.nt +
                                      "(...)' does not name an array",
                                  span);
                            return;
                        }
                        if (ref.kind == Ref::Kind::Indexed)
                            check_defs_membership(s, ref.nt, ref.id, span);
                        return;
                    }
                    auto sites = enclosing_sites(s);
                    if (sites.empty()) break;
                    // Conservatively check against the first invoking site;
                    // all sites must agree for the reference to be accepted.
                    bool everywhere = true;
                    for (const auto& site : sites)
                        if (resolve_nt_term(*site.alt, site.term_index, ref.nt) < 0)
                            everywhere = false;
                    if (!everywhere) break;
                    a = sites.front().alt;
                    before = sites.front().term_index;
                    s.chain.erase(s.chain.begin());
                }
                error("UNDEF_ATTR",
                      "no array '" + ref.nt + "' is in scope for indexed reference",
                      span);
                return;
            }
        }
    }

    void check_rule(const Rule& r, const RuleScope& scope) {
        for (const auto& alt : r.alternatives) {
            for (std::size_t i = 0; i < alt.terms.size(); ++i) {
                const Term& t = alt.terms[i];
                for (auto& te : term_exprs(t)) {
                    std::vector<std::string> binders = te.binders;
                    walk_refs(te.expr, binders,
                              [&](const Ref& ref, const std::vector<std::string>& bs) {
                                  check_ref(ref, bs, alt, static_cast<int>(i), scope,
                                            t.span);
                              });
                }
            }
        }
        for (const auto& l : r.locals) {
            RuleScope inner = scope;
            inner.chain.insert(inner.chain.begin(), &l);
            check_rule(l, inner);
        }
    }

    // ---- dependency graph / reordering ----

    // References in a local rule's body that are not resolvable inside the
    // local itself; they capture names from the invoking alternative.
    void collect_captured_refs(const Rule& local, std::vector<Ref>& out) {
        for (const auto& alt : local.alternatives) {
            for (std::size_t i = 0; i < alt.terms.size(); ++i) {
                for (auto& te : term_exprs(alt.terms[i])) {
                    std::vector<std::string> binders = te.binders;
                    walk_refs(te.expr, binders,
                              [&](const Ref& ref, const std::vector<std::string>& bs) {
                                  bool local_ok = false;
                                  switch (ref.kind) {
                                      case Ref::Kind::EOI:
                                          local_ok = true;
                                          break;
                                      case Ref::Kind::Bare:
                                          local_ok =
                                              std::find(bs.begin(), bs.end(), ref.id) !=
                                                  bs.end() ||
                                              bare_resolves_in(alt, -1, ref.id);
                                          break;
                                      default:
                                          local_ok = resolve_nt_term(
                                                         alt, static_cast<int>(i),
                                                         ref.nt) >= 0;
                                          break;
                                  }
                                  if (!local_ok) out.push_back(ref);
                              });
                }
            }
        }
        for (const auto& l : local.locals) collect_captured_refs(l, out);
        // A local invoking a sibling local inherits its captures.
        // (Handled by the caller iterating all locals the invoked name reaches.)
    }

    void add_edge(std::vector<std::set<int>>& deps, int from, int to) {
        if (to >= 0 && to != from) deps[static_cast<std::size_t>(from)].insert(to);
        if (to == from)
            deps[static_cast<std::size_t>(from)].insert(to);  // self-cycle detected later
    }

    void reorder_alt(Alternative& alt, const RuleScope& scope, const std::string& owner) {
        int n = static_cast<int>(alt.terms.size());
        std::vector<std::set<int>> deps(static_cast<std::size_t>(n));

        auto dep_of_ref = [&](const Ref& ref, const std::vector<std::string>& bs,
                              int i) {
            switch (ref.kind) {
                case Ref::Kind::EOI:
                    return;
                case Ref::Kind::Bare: {
                    if (std::find(bs.begin(), bs.end(), ref.id) != bs.end()) return;
                    for (int j = 0; j < n; ++j) {
                        const Term& t = alt.terms[static_cast<std::size_t>(j)];
                        if (t.kind == Term::Kind::AttrDef && t.name == ref.id) {
                            add_edge(deps, i, j);
                            return;
                        }
                    }
                    return;  // outer capture: no edge inside this alternative
                }
                default:
                    add_edge(deps, i, resolve_nt_term(alt, i, ref.nt));
                    return;
            }
        };

        for (int i = 0; i < n; ++i) {
            const Term& t = alt.terms[static_cast<std::size_t>(i)];
            for (auto& te : term_exprs(t)) {
                std::vector<std::string> binders = te.binders;
                walk_refs(te.expr, binders,
                          [&](const Ref& ref, const std::vector<std::string>& bs) {
                              dep_of_ref(ref, bs, i);
                          });
            }
            // Invoking a local rule makes this term depend on everything the
            // local's body captures from this alternative.
            for (const auto& name : term_invoked_names(t)) {
                auto target = scope.resolve(name);
                if (target.kind == RuleScope::Target::Kind::Rule && target.is_local) {
                    std::vector<Ref> captured;
                    collect_captured_refs(*target.rule, captured);
                    for (const auto& ref : captured) dep_of_ref(ref, {}, i);
                }
            }
        }

        // Stable topological sort: smallest ready textual index first.
        std::vector<int> indegree(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n; ++i)
            indegree[static_cast<std::size_t>(i)] =
                static_cast<int>(deps[static_cast<std::size_t>(i)].size());
        std::vector<std::vector<int>> dependents(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int j : deps[static_cast<std::size_t>(i)])
                dependents[static_cast<std::size_t>(j)].push_back(i);

        std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
        for (int i = 0; i < n; ++i)
            if (indegree[static_cast<std::size_t>(i)] == 0) ready.push(i);
        std::vector<int> order;
        while (!ready.empty()) {
            int i = ready.top();
            ready.pop();
            order.push_back(i);
            for (int d : dependents[static_cast<std::size_t>(i)])
                if (--indegree[static_cast<std::size_t>(d)] == 0) ready.push(d);
        }
        if (static_cast<int>(order.size()) != n) {
            std::string cycle;
            for (int i = 0; i < n; ++i) {
                if (indegree[static_cast<std::size_t>(i)] > 0) {
                    if (!cycle.empty()) cycle += ", ";
                    cycle += pretty_print(alt.terms[static_cast<std::size_t>(i)]);
                }
            }
            error("CYCLIC_ATTRS",
                  "cyclic attribute dependencies in rule '" + owner + "' among: " + cycle,
                  alt.span);
            alt.eval_order.clear();
            return;
        }
        alt.eval_order = std::move(order);
    }

    void reorder_rule(Rule& r, const RuleScope& scope) {
        for (auto& alt : r.alternatives) reorder_alt(alt, scope, r.name);
        for (auto& l : r.locals) {
            RuleScope inner = scope;
            inner.chain.insert(inner.chain.begin(), &l);
            reorder_rule(l, inner);
        }
    }

    const Grammar& g_;
    const DefSets& defs_;
    Diagnostics diags_;
};

}  // namespace

Diagnostics check_references(const Grammar& g, const DefSets& defs) {
    return Checker(g, defs).check_references();
}

CheckResult check_and_reorder(const Grammar& g, const DefSets& defs) {
    CheckResult res;
    res.grammar = g;
    Checker checker(res.grammar, defs);
    res.diagnostics = checker.reorder(res.grammar);
    return res;
}

PipelineResult load_grammar(const SourceText& src) {
    PipelineResult res;
    auto parsed = parse_grammar(src);
    if (!parsed.ok()) {
        res.diagnostics = std::move(parsed.diagnostics);
        return res;
    }
    res.grammar = std::move(parsed.grammar);
    auto vdiags = validate_ast(res.grammar);
    if (!vdiags.empty()) {
        res.diagnostics = std::move(vdiags);
        return res;
    }
    auto completed = complete_intervals(res.grammar);
    res.fully_omitted_intervals = completed.stats.fully_omitted;
    res.length_only_intervals = completed.stats.length_only;
    if (!completed.ok()) {
        res.diagnostics = std::move(completed.diagnostics);
        return res;
    }
    res.grammar = std::move(completed.grammar);
    res.def_sets = compute_def_sets(res.grammar);
    auto rdiags = check_references(res.grammar, res.def_sets);
    if (!rdiags.empty()) {
        res.diagnostics = std::move(rdiags);
        return res;
    }
    auto checked = check_and_reorder(res.grammar, res.def_sets);
    res.diagnostics = std::move(checked.diagnostics);
    res.grammar = std::move(checked.grammar);
    return res;
}

PipelineResult load_grammar(const std::string& text) {
    return load_grammar(SourceText::from_string(text));
}

}  // namespace ipg
