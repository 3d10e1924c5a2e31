#include "ipg/terminate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>

#include "ipg/check.hpp"
#include "ipg/linear.hpp"

namespace ipg {

int NTGraph::vertex(const std::string& name) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] == name) return static_cast<int>(i);
    return -1;
}

// ---------------------------------------------------------------------------
// Graph construction

namespace {

struct GraphBuilder {
    const Grammar& g;
    NTGraph out;

    int intern(const std::string& name) {
        int v = out.vertex(name);
        if (v >= 0) return v;
        out.vertices.push_back(name);
        return static_cast<int>(out.vertices.size() - 1);
    }

    std::string qualified(const RuleScope& scope, const std::string& name) {
        auto t = scope.resolve(name);
        return t.kind == RuleScope::Target::Kind::None ? name : t.qualified_name;
    }

    void collect_label_targets(const ExprPtr& e, const RuleScope& scope,
                               std::map<std::string, std::string>& targets) {
        if (!e) return;
        if (e->kind == Expr::Kind::Ref) {
            if (!e->ref.nt.empty())
                targets.emplace(e->ref.nt, qualified(scope, e->ref.nt));
            collect_label_targets(e->ref.index, scope, targets);
            return;
        }
        collect_label_targets(e->a, scope, targets);
        collect_label_targets(e->b, scope, targets);
        collect_label_targets(e->c, scope, targets);
    }

    void add_edge(const std::string& from_q, const std::string& to_name,
                  const Interval& iv, const RuleScope& scope) {
        NTEdge e;
        e.from = intern(from_q);
        e.to = intern(qualified(scope, to_name));
        e.lo = iv.lo;
        e.hi = iv.hi;
        collect_label_targets(iv.lo, scope, e.label_targets);
        collect_label_targets(iv.hi, scope, e.label_targets);
        out.edges.push_back(std::move(e));
    }

    void visit_rule(const Rule& r, const RuleScope& scope, const std::string& prefix) {
        std::string q = prefix + r.name;
        intern(q);
        for (const auto& alt : r.alternatives) {
            for (const auto& t : alt.terms) {
                switch (t.kind) {
                    case Term::Kind::NT:
                        add_edge(q, t.name, t.interval, scope);
                        break;
                    case Term::Kind::ForArray:
                        add_edge(q, t.elem_name, t.elem_interval, scope);
                        break;
                    case Term::Kind::Switch:
                        for (const auto& br : t.branches)
                            add_edge(q, br.name, br.interval, scope);
                        add_edge(q, t.default_branch.name, t.default_branch.interval,
                                 scope);
                        break;
                    default:
                        break;
                }
            }
        }
        for (const auto& l : r.locals) {
            RuleScope inner = scope;
            inner.chain.insert(inner.chain.begin(), &l);
            visit_rule(l, inner, q + ".");
        }
    }
};

}  // namespace

NTGraph build_nt_graph(const Grammar& g) {
    GraphBuilder b{g, {}};
    for (const auto& r : g.rules) {
        RuleScope scope{&g, {&r}};
        b.visit_rule(r, scope, "");
    }
    for (const auto& e : g.externals) b.intern(e.name);
    return std::move(b.out);
}

// ---------------------------------------------------------------------------
// consumes_terminal

std::set<std::string> consumes_terminal(const Grammar& g) {
    std::set<std::string> set;
    for (const auto& name : builtin_names())
        if (name != "Raw") set.insert(name);

    struct Entry {
        const Rule* rule;
        RuleScope scope;
        std::string qualified;
    };
    std::vector<Entry> entries;
    std::function<void(const Rule&, const RuleScope&, const std::string&)> collect =
        [&](const Rule& r, const RuleScope& scope, const std::string& prefix) {
            entries.push_back({&r, scope, prefix + r.name});
            for (const auto& l : r.locals) {
                RuleScope inner = scope;
                inner.chain.insert(inner.chain.begin(), &l);
                collect(l, inner, prefix + r.name + ".");
            }
        };
    for (const auto& r : g.rules) collect(r, RuleScope{&g, {&r}}, "");

    auto qualified = [&](const RuleScope& scope, const std::string& name) {
        auto t = scope.resolve(name);
        return t.kind == RuleScope::Target::Kind::None ? name : t.qualified_name;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : entries) {
            if (set.count(e.qualified)) continue;
            bool all_alts = !e.rule->alternatives.empty();
            for (const auto& alt : e.rule->alternatives) {
                bool consumes = false;
                for (const auto& t : alt.terms) {
                    switch (t.kind) {
                        case Term::Kind::Terminal:
                            if (!t.bytes.empty()) consumes = true;
                            break;
                        case Term::Kind::NT:
                            if (set.count(qualified(e.scope, t.name))) consumes = true;
                            break;
                        case Term::Kind::Switch: {
                            bool all = set.count(
                                qualified(e.scope, t.default_branch.name)) != 0;
                            for (const auto& br : t.branches)
                                if (!set.count(qualified(e.scope, br.name))) all = false;
                            if (all) consumes = true;
                            break;
                        }
                        default:
                            break;  // arrays may run zero times; attrs/preds free
                    }
                    if (consumes) break;
                }
                if (!consumes) {
                    all_alts = false;
                    break;
                }
            }
            if (all_alts) {
                set.insert(e.qualified);
                changed = true;
            }
        }
    }
    return set;
}

// ---------------------------------------------------------------------------
// Cycle enumeration

std::vector<Cycle> elementary_cycles(const NTGraph& ng, std::size_t cap,
                                     bool* exceeded) {
    if (exceeded) *exceeded = false;
    int n = static_cast<int>(ng.vertices.size());
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < ng.edges.size(); ++i)
        adj[static_cast<std::size_t>(ng.edges[i].from)].push_back(static_cast<int>(i));

    std::vector<Cycle> cycles;
    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    std::vector<int> path;
    bool stop = false;

    std::function<void(int, int)> dfs = [&](int start, int v) {
        if (stop) return;
        for (int ei : adj[static_cast<std::size_t>(v)]) {
            if (stop) return;
            int to = ng.edges[static_cast<std::size_t>(ei)].to;
            if (to < start) continue;  // canonical form: smallest vertex first
            if (to == start) {
                path.push_back(ei);
                cycles.push_back({path});
                path.pop_back();
                if (cycles.size() >= cap) {
                    stop = true;
                    if (exceeded) *exceeded = true;
                    return;
                }
            } else if (!visited[static_cast<std::size_t>(to)]) {
                visited[static_cast<std::size_t>(to)] = true;
                path.push_back(ei);
                dfs(start, to);
                path.pop_back();
                visited[static_cast<std::size_t>(to)] = false;
            }
        }
    };

    for (int s = 0; s < n && !stop; ++s) {
        visited[static_cast<std::size_t>(s)] = true;
        dfs(s, s);
        visited[static_cast<std::size_t>(s)] = false;
    }
    return cycles;
}

// ---------------------------------------------------------------------------
// Per-cycle satisfiability

namespace {

struct Lin {
    std::map<int, linear::Rat> coeffs;
    linear::Rat c;

    bool is_const() const { return coeffs.empty(); }
};

struct Linearizer {
    std::map<std::string, int>& symbols;
    int edge_pos;  // position in the cycle, scopes non-EOI symbols
    // end-attribute symbols of consumers seen so far
    std::set<int>& consumer_end_syms;
    const std::map<std::string, std::string>& label_targets;
    const std::set<std::string>& consumers;

    int sym(const std::string& key) {
        auto it = symbols.find(key);
        if (it != symbols.end()) return it->second;
        int id = static_cast<int>(symbols.size());
        symbols.emplace(key, id);
        return id;
    }

    std::optional<Lin> lin(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::IntLit: {
                Lin l;
                l.c = linear::Rat::of(e.value);
                return l;
            }
            case Expr::Kind::Ref: {
                Lin l;
                int id;
                if (e.ref.kind == Ref::Kind::EOI) {
                    id = sym("EOI");
                } else {
                    id = sym("e" + std::to_string(edge_pos) + "|" +
                             pretty_print(e));
                    if (e.ref.kind == Ref::Kind::QualEnd ||
                        e.ref.kind == Ref::Kind::IndexedEnd) {
                        auto it = label_targets.find(e.ref.nt);
                        if (it != label_targets.end() && consumers.count(it->second))
                            consumer_end_syms.insert(id);
                    }
                }
                l.coeffs[id] = linear::Rat::of(1);
                return l;
            }
            case Expr::Kind::BinOp: {
                auto a = lin(*e.a);
                auto b = lin(*e.b);
                if (!a || !b) return std::nullopt;
                switch (e.op) {
                    case BinOpKind::Add:
                    case BinOpKind::Sub: {
                        Lin out = *a;
                        bool sub = e.op == BinOpKind::Sub;
                        for (const auto& [v, k] : b->coeffs) {
                            auto& slot = out.coeffs[v];
                            slot = sub ? slot - k : slot + k;
                            if (slot.is_zero()) out.coeffs.erase(v);
                        }
                        out.c = sub ? out.c - b->c : out.c + b->c;
                        return out;
                    }
                    case BinOpKind::Mul: {
                        const Lin* scalar = a->is_const() ? &*a : nullptr;
                        const Lin* other = scalar ? &*b : &*a;
                        if (!scalar && b->is_const()) scalar = &*b;
                        if (!scalar) return std::nullopt;
                        Lin out;
                        out.c = other->c * scalar->c;
                        for (const auto& [v, k] : other->coeffs) {
                            linear::Rat r = k * scalar->c;
                            if (!r.is_zero()) out.coeffs[v] = r;
                        }
                        return out;
                    }
                    default:
                        // Division, shifts, bitwise and comparisons are only
                        // linearizable when fully constant with an exact
                        // integer result; treat them as nonlinear.
                        return std::nullopt;
                }
            }
            case Expr::Kind::Cond:
            case Expr::Kind::Exists:
                return std::nullopt;
        }
        return std::nullopt;
    }
};

}  // namespace

CycleResult cycle_satisfiable(const NTGraph& ng, const Cycle& c,
                              const std::set<std::string>& consumers) {
    std::map<std::string, int> symbols;
    std::set<int> consumer_end_syms;
    std::vector<linear::Constraint> constraints;

    int eoi = -1;
    for (std::size_t pos = 0; pos < c.edge_indices.size(); ++pos) {
        const NTEdge& e = ng.edges[static_cast<std::size_t>(c.edge_indices[pos])];
        Linearizer lz{symbols, static_cast<int>(pos), consumer_end_syms,
                      e.label_targets, consumers};
        auto lo = e.lo ? lz.lin(*e.lo) : std::nullopt;
        auto hi = e.hi ? lz.lin(*e.hi) : std::nullopt;
        if (!lo || !hi) return CycleResult::Unknown;
        // lo = 0
        linear::Constraint c0;
        c0.coeffs = lo->coeffs;
        c0.constant = lo->c;
        constraints.push_back(std::move(c0));
        // hi - EOI = 0
        auto it = symbols.find("EOI");
        eoi = it == symbols.end() ? lz.sym("EOI") : it->second;
        linear::Constraint c1;
        c1.coeffs = hi->coeffs;
        c1.constant = hi->c;
        auto& k = c1.coeffs[eoi];
        k = k - linear::Rat::of(1);
        if (k.is_zero()) c1.coeffs.erase(eoi);
        constraints.push_back(std::move(c1));
    }
    // EOI >= 0 (input lengths are non-negative).
    if (eoi >= 0) {
        linear::Constraint ge;
        ge.is_equality = false;
        ge.coeffs[eoi] = linear::Rat::of(1);
        constraints.push_back(std::move(ge));
    }
    // end >= 1 for consumers' end attributes appearing in the formula.
    for (int s : consumer_end_syms) {
        linear::Constraint ge;
        ge.is_equality = false;
        ge.coeffs[s] = linear::Rat::of(1);
        ge.constant = linear::Rat::of(-1);
        constraints.push_back(std::move(ge));
    }

    try {
        return linear::feasible(std::move(constraints)) ? CycleResult::Flag
                                                        : CycleResult::Pass;
    } catch (const linear::Overflow&) {
        return CycleResult::Unknown;
    }
}

// ---------------------------------------------------------------------------
// Report

TerminationReport check_termination(const Grammar& g, std::size_t cycle_cap) {
    auto t0 = std::chrono::steady_clock::now();
    TerminationReport report;
    NTGraph ng = build_nt_graph(g);
    auto consumers = consumes_terminal(g);
    bool exceeded = false;
    auto cycles = elementary_cycles(ng, cycle_cap, &exceeded);

    bool any_flag = false, any_unknown = exceeded;
    for (const auto& c : cycles) {
        CycleReport cr;
        for (int ei : c.edge_indices) {
            const NTEdge& e = ng.edges[static_cast<std::size_t>(ei)];
            cr.path.push_back(ng.vertices[static_cast<std::size_t>(e.from)]);
            cr.intervals.emplace_back(pretty_print(*e.lo), pretty_print(*e.hi));
        }
        cr.result = cycle_satisfiable(ng, c, consumers);
        if (cr.result == CycleResult::Flag) any_flag = true;
        if (cr.result == CycleResult::Unknown) any_unknown = true;
        report.cycles.push_back(std::move(cr));
    }
    report.verdict = any_flag ? Verdict::MayNotTerminate
                              : (any_unknown ? Verdict::Unknown : Verdict::Terminates);
    auto t1 = std::chrono::steady_clock::now();
    report.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return report;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Terminates: return "Terminates";
        case Verdict::MayNotTerminate: return "MayNotTerminate";
        case Verdict::Unknown: return "Unknown";
    }
    return "Unknown";
}

namespace {

void append_json_str(std::string& out, const std::string& s) {
    out += '"';
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    out += '"';
}

}  // namespace

std::string report_to_json(const TerminationReport& r) {
    std::string out = "{\"verdict\":\"";
    out += verdict_name(r.verdict);
    out += "\",\"cycles\":[";
    for (std::size_t i = 0; i < r.cycles.size(); ++i) {
        if (i) out += ',';
        const auto& c = r.cycles[i];
        out += "{\"path\":[";
        for (std::size_t j = 0; j < c.path.size(); ++j) {
            if (j) out += ',';
            append_json_str(out, c.path[j]);
        }
        out += "],\"intervals\":[";
        for (std::size_t j = 0; j < c.intervals.size(); ++j) {
            if (j) out += ',';
            out += '[';
            append_json_str(out, c.intervals[j].first);
            out += ',';
            append_json_str(out, c.intervals[j].second);
            out += ']';
        }
        out += "],\"result\":\"";
        out += c.result == CycleResult::Pass
                   ? "pass"
                   : (c.result == CycleResult::Flag ? "flag" : "unknown");
        out += "\"}";
    }
    out += "],\"ms\":";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", r.ms);
    out += buf;
    out += "}";
    return out;
}

}  // namespace ipg
