#include "ipg/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <iostream>
#include <optional>

namespace ipg {

// ---------------------------------------------------------------------------
// Trees

std::int64_t Tree::attr(const std::string& name) const {
    auto it = env.find(name);
    if (it == env.end()) throw EngineError("missing attribute '" + name + "'");
    return it->second;
}

bool Tree::has_attr(const std::string& name) const { return env.count(name) != 0; }

TreePtr Tree::node(std::string nt, std::map<std::string, std::int64_t> env,
                   std::vector<TreePtr> children) {
    auto t = std::make_shared<Tree>();
    t->kind = Kind::Node;
    t->nt = std::move(nt);
    t->env = std::move(env);
    t->children = std::move(children);
    return t;
}

TreePtr Tree::array(std::vector<TreePtr> elems, std::int64_t loop_start) {
    auto t = std::make_shared<Tree>();
    t->kind = Kind::Array;
    t->children = std::move(elems);
    t->loop_start = loop_start;
    return t;
}

TreePtr Tree::leaf(std::vector<std::uint8_t> bytes) {
    auto t = std::make_shared<Tree>();
    t->kind = Kind::Leaf;
    t->bytes = std::move(bytes);
    return t;
}

bool tree_equal(const Tree& a, const Tree& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Tree::Kind::Leaf:
            return a.bytes == b.bytes;
        case Tree::Kind::Array:
            if (a.loop_start != b.loop_start) return false;
            break;
        case Tree::Kind::Node:
            if (a.nt != b.nt || a.env != b.env) return false;
            break;
    }
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!tree_equal(a.children[i], b.children[i])) return false;
    return true;
}

bool tree_equal(const TreePtr& a, const TreePtr& b) {
    if (!a || !b) return !a && !b;
    return tree_equal(*a, *b);
}

// ---------------------------------------------------------------------------
// Builtin blackbox parsers

namespace {

BlackboxResult fail_bb() { return {}; }

BlackboxResult uint_reader(const std::uint8_t* p, std::size_t n, std::size_t width,
                           bool big_endian) {
    if (n < width) return fail_bb();
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
        std::size_t byte = big_endian ? i : width - 1 - i;
        v = (v << 8) | p[byte];
    }
    BlackboxResult r;
    r.ok = true;
    r.consumed_end = width;
    r.attrs["val"] = static_cast<std::int64_t>(v);
    return r;
}

BlackboxResult ascii_int(const std::uint8_t* p, std::size_t n) {
    std::size_t i = 0;
    std::int64_t v = 0;
    while (i < n && p[i] >= '0' && p[i] <= '9') {
        int digit = p[i] - '0';
        if (v > (INT64_MAX - digit) / 10) return fail_bb();
        v = v * 10 + digit;
        ++i;
    }
    if (i == 0) return fail_bb();
    BlackboxResult r;
    r.ok = true;
    r.consumed_end = i;
    r.attrs["val"] = v;
    return r;
}

}  // namespace

BlackboxRegistry BlackboxRegistry::with_builtins() {
    BlackboxRegistry reg;
    auto uint_bb = [](std::size_t width, bool be) {
        return [width, be](const std::uint8_t* p, std::size_t n) {
            return uint_reader(p, n, width, be);
        };
    };
    reg.add("Byte", uint_bb(1, false));
    reg.add("UInt16LE", uint_bb(2, false));
    reg.add("UInt32LE", uint_bb(4, false));
    reg.add("UInt64LE", uint_bb(8, false));
    reg.add("UInt16BE", uint_bb(2, true));
    reg.add("UInt32BE", uint_bb(4, true));
    reg.add("AsciiInt", ascii_int);
    reg.add("Raw", [](const std::uint8_t*, std::size_t n) {
        BlackboxResult r;
        r.ok = true;
        r.consumed_end = n;
        return r;
    });
    return reg;
}

bool BlackboxRegistry::add(const std::string& name, BlackboxFn fn) {
    return fns_.emplace(name, std::move(fn)).second;
}

const BlackboxFn* BlackboxRegistry::find(const std::string& name) const {
    auto it = fns_.find(name);
    return it == fns_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Interpreter

namespace {

// Soft failure of expression evaluation: fails the enclosing alternative
// (or the whole parse under strict evaluation).
struct EvalFault {
    std::string msg;
};

struct Frame {
    const Rule* rule = nullptr;
    const Alternative* alt = nullptr;
    std::vector<const Rule*> scope_chain;  // innermost rule first
    std::map<std::string, std::int64_t> env;
    std::vector<TreePtr> results;  // indexed by textual term position
    std::vector<std::pair<std::string, std::int64_t>> binders;
    Frame* outer = nullptr;   // invoking frame for local rules
    int outer_before = -1;    // textual index of the invoking term in outer
    int current = -1;         // textual index of the term being evaluated
};

void upd_start_end(std::map<std::string, std::int64_t>& env, std::int64_t l,
                   std::int64_t r, bool touched) {
    if (!touched) return;
    env["start"] = std::min(env["start"], l);
    env["end"] = std::max(env["end"], r);
}

std::size_t count_rules(const Rule& r) {
    std::size_t n = 1;
    for (const auto& l : r.locals) n += count_rules(l);
    return n;
}

class Interp {
  public:
    Interp(const std::uint8_t* data, std::size_t size, const Grammar& g,
           const EngineOptions& opts, const BlackboxRegistry& reg)
        : data_(data), size_(size), g_(g), opts_(opts), reg_(reg) {
        std::size_t rules = 0;
        for (const auto& r : g.rules) rules += count_rules(r);
        max_depth_ = opts.max_depth ? opts.max_depth
                                    : std::max<std::size_t>(4096, rules * (size + 1));
        trace_ = opts.trace ? (opts.trace_out ? opts.trace_out : &std::cerr) : nullptr;
    }

    ParseOutcome run(const std::string& start_nt) {
        ParseOutcome out;
        out.tree = invoke_name(start_nt, {}, 0, size_, nullptr, -1);
        out.success = out.tree != nullptr;
        out.stats = stats_;
        return out;
    }

  private:
    // ---- name resolution ----

    const Rule* resolve_local(const std::vector<const Rule*>& chain,
                              const std::string& name,
                              std::vector<const Rule*>* new_chain) {
        for (std::size_t i = 0; i < chain.size(); ++i) {
            for (const auto& l : chain[i]->locals) {
                if (l.name == name) {
                    *new_chain = std::vector<const Rule*>(chain.begin() +
                                                              static_cast<long>(i),
                                                          chain.end());
                    new_chain->insert(new_chain->begin(), &l);
                    return &l;
                }
            }
        }
        return nullptr;
    }

    // Parses `name` over the absolute window [abs_l, abs_r). Returns a Node
    // whose start/end are relative to that window, or null on failure.
    TreePtr invoke_name(const std::string& name,
                        const std::vector<const Rule*>& chain, std::size_t abs_l,
                        std::size_t abs_r, Frame* outer, int outer_before) {
        ++stats_.invocations;
        if (++depth_ > max_depth_)
            throw DepthExceededError("recursion depth exceeded " +
                                     std::to_string(max_depth_) + " at '" + name +
                                     "'");
        stats_.max_depth_seen = std::max(stats_.max_depth_seen, depth_);
        if (trace_)
            *trace_ << "trace: enter " << name << " [" << abs_l << "," << abs_r
                    << ")\n";
        TreePtr result;
        std::vector<const Rule*> local_chain;
        if (const Rule* local = resolve_local(chain, name, &local_chain)) {
            result = parse_rule(*local, local_chain, abs_l, abs_r, outer, outer_before);
        } else if (const Rule* global = g_.find_rule(name)) {
            result = parse_global(*global, name, abs_l, abs_r);
        } else if (const BlackboxFn* fn = reg_.find(name)) {
            result = run_blackbox(name, *fn, abs_l, abs_r);
        } else {
            --depth_;
            throw EngineError("no rule or blackbox named '" + name + "'");
        }
        --depth_;
        if (trace_)
            *trace_ << "trace: exit " << name << " "
                    << (result ? "success" : "fail") << "\n";
        return result;
    }

    TreePtr parse_global(const Rule& rule, const std::string& name, std::size_t abs_l,
                         std::size_t abs_r) {
        MemoKey key{name, abs_l, abs_r};
        if (opts_.memo) {
            auto it = memo_.find(key);
            if (it != memo_.end()) {
                ++stats_.memo_hits;
                return it->second;
            }
        }
        TreePtr result = parse_rule(rule, {&rule}, abs_l, abs_r, nullptr, -1);
        if (opts_.memo) memo_.emplace(std::move(key), result);
        return result;
    }

    TreePtr run_blackbox(const std::string& name, const BlackboxFn& fn,
                         std::size_t abs_l, std::size_t abs_r) {
        std::size_t len = abs_r - abs_l;
        BlackboxResult r = fn(data_ + abs_l, len);
        if (!r.ok) return nullptr;
        if (r.consumed_end > len)
            throw BlackboxContractError("blackbox '" + name +
                                        "' consumed past its slice");
        std::map<std::string, std::int64_t> env = std::move(r.attrs);
        env["start"] = 0;
        env["end"] = static_cast<std::int64_t>(r.consumed_end);
        env["EOI"] = static_cast<std::int64_t>(len);
        std::vector<std::uint8_t> consumed(data_ + abs_l,
                                           data_ + abs_l + r.consumed_end);
        return Tree::node(name, std::move(env), {Tree::leaf(std::move(consumed))});
    }

    // ---- rule / alternative evaluation ----

    TreePtr parse_rule(const Rule& rule, const std::vector<const Rule*>& chain,
                       std::size_t abs_l, std::size_t abs_r, Frame* outer,
                       int outer_before) {
        auto len = static_cast<std::int64_t>(abs_r - abs_l);
        for (const auto& alt : rule.alternatives) {
            Frame f;
            f.rule = &rule;
            f.alt = &alt;
            f.scope_chain = chain;
            f.env = {{"EOI", len}, {"start", len}, {"end", 0}};
            f.results.assign(alt.terms.size(), nullptr);
            f.outer = outer;
            f.outer_before = outer_before;

            bool ok = true;
            try {
                if (alt.eval_order.empty()) {
                    for (int i = 0; i < static_cast<int>(alt.terms.size()); ++i)
                        if (!eval_term(f, i, abs_l, len)) {
                            ok = false;
                            break;
                        }
                } else {
                    for (int i : alt.eval_order)
                        if (!eval_term(f, i, abs_l, len)) {
                            ok = false;
                            break;
                        }
                }
            } catch (const EvalFault& fault) {
                if (opts_.strict_eval) throw StrictEvalError(fault.msg);
                ok = false;
            }
            if (!ok) continue;

            std::vector<TreePtr> children;
            for (const auto& r : f.results)
                if (r) children.push_back(r);
            return Tree::node(rule.name, std::move(f.env), std::move(children));
        }
        return nullptr;
    }

    // Returns false on ordinary failure of the term; EvalFault propagates.
    bool eval_term(Frame& f, int i, std::size_t abs_l, std::int64_t len) {
        f.current = i;
        const Term& t = f.alt->terms[static_cast<std::size_t>(i)];
        switch (t.kind) {
            case Term::Kind::AttrDef:
                f.env[t.name] = eval(f, *t.expr);
                return true;
            case Term::Kind::Predicate:
                return eval(f, *t.expr) != 0;
            case Term::Kind::Terminal: {
                std::int64_t l, r;
                if (!eval_interval(f, t.interval, len, &l, &r)) return false;
                auto want = static_cast<std::int64_t>(t.bytes.size());
                if (r - l < want) return false;
                assert(abs_l + static_cast<std::size_t>(l + want) <= size_);
                if (want > 0 &&
                    std::memcmp(data_ + abs_l + static_cast<std::size_t>(l),
                                t.bytes.data(), t.bytes.size()) != 0)
                    return false;
                f.results[static_cast<std::size_t>(i)] = Tree::leaf(t.bytes);
                upd_start_end(f.env, l, l + want, want > 0);
                return true;
            }
            case Term::Kind::NT: {
                std::int64_t l, r;
                if (!eval_interval(f, t.interval, len, &l, &r)) return false;
                TreePtr child = invoke_child(f, i, t.name, abs_l, l, r);
                if (!child) return false;
                f.results[static_cast<std::size_t>(i)] = child;
                return true;
            }
            case Term::Kind::ForArray: {
                std::int64_t from = eval(f, *t.from);
                std::int64_t to = eval(f, *t.to);
                std::vector<TreePtr> elems;
                for (std::int64_t k = from; k < to; ++k) {
                    f.binders.emplace_back(t.name, k);
                    std::int64_t l, r;
                    bool in_range = eval_interval(f, t.elem_interval, len, &l, &r);
                    TreePtr child;
                    if (in_range) child = invoke_child(f, i, t.elem_name, abs_l, l, r);
                    f.binders.pop_back();
                    if (!child) return false;
                    elems.push_back(std::move(child));
                }
                f.results[static_cast<std::size_t>(i)] =
                    Tree::array(std::move(elems), from);
                return true;
            }
            case Term::Kind::Switch: {
                const SwitchBranch* chosen = &t.default_branch;
                for (const auto& br : t.branches) {
                    if (eval(f, *br.cond) != 0) {
                        chosen = &br;
                        break;
                    }
                }
                std::int64_t l, r;
                if (!eval_interval(f, chosen->interval, len, &l, &r)) return false;
                TreePtr child = invoke_child(f, i, chosen->name, abs_l, l, r);
                if (!child) return false;
                f.results[static_cast<std::size_t>(i)] = child;
                return true;
            }
        }
        return false;
    }

    bool eval_interval(Frame& f, const Interval& iv, std::int64_t len,
                       std::int64_t* l, std::int64_t* r) {
        assert(iv.kind == Interval::Kind::Full);
        *l = eval(f, *iv.lo);
        *r = eval(f, *iv.hi);
        return 0 <= *l && *l <= *r && *r <= len;
    }

    // Parses nonterminal `name` on the window [l, r) relative to the current
    // slice at abs_l, rebases the child by +l and merges start/end.
    TreePtr invoke_child(Frame& f, int term_index, const std::string& name,
                         std::size_t abs_l, std::int64_t l, std::int64_t r) {
        TreePtr child = invoke_name(name, f.scope_chain,
                                    abs_l + static_cast<std::size_t>(l),
                                    abs_l + static_cast<std::size_t>(r), &f,
                                    term_index);
        if (!child) return nullptr;
        auto rebased = std::make_shared<Tree>(*child);
        std::int64_t child_start = rebased->env.at("start");
        std::int64_t child_end = rebased->env.at("end");
        rebased->env["start"] = child_start + l;
        rebased->env["end"] = child_end + l;
        upd_start_end(f.env, child_start + l, child_end + l, child_end != 0);
        return rebased;
    }

    // ---- expression evaluation ----

    [[noreturn]] static void fault(std::string msg) { throw EvalFault{std::move(msg)}; }

    std::int64_t eval(Frame& f, const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::IntLit:
                return e.value;
            case Expr::Kind::BinOp:
                return eval_binop(f, e);
            case Expr::Kind::Cond:
                return eval(f, *e.a) != 0 ? eval(f, *e.b) : eval(f, *e.c);
            case Expr::Kind::Exists:
                return eval_exists(f, e);
            case Expr::Kind::Ref:
                return ref_value(f, e.ref);
        }
        fault("bad expression");
    }

    std::int64_t eval_binop(Frame& f, const Expr& e) {
        if (e.op == BinOpKind::And) {
            return eval(f, *e.a) != 0 && eval(f, *e.b) != 0;
        }
        if (e.op == BinOpKind::Or) {
            return eval(f, *e.a) != 0 || eval(f, *e.b) != 0;
        }
        std::int64_t a = eval(f, *e.a);
        std::int64_t b = eval(f, *e.b);
        std::int64_t out = 0;
        switch (e.op) {
            case BinOpKind::Add:
                if (__builtin_add_overflow(a, b, &out)) fault("overflow in +");
                return out;
            case BinOpKind::Sub:
                if (__builtin_sub_overflow(a, b, &out)) fault("overflow in -");
                return out;
            case BinOpKind::Mul:
                if (__builtin_mul_overflow(a, b, &out)) fault("overflow in *");
                return out;
            case BinOpKind::Div:
                if (b == 0) fault("division by zero");
                if (a == INT64_MIN && b == -1) fault("overflow in /");
                return a / b;
            case BinOpKind::Mod:
                if (b == 0) fault("mod by zero");
                if (a == INT64_MIN && b == -1) fault("overflow in mod");
                return a % b;
            case BinOpKind::Eq: return a == b;
            case BinOpKind::Ne: return a != b;
            case BinOpKind::Lt: return a < b;
            case BinOpKind::Gt: return a > b;
            case BinOpKind::Le: return a <= b;
            case BinOpKind::Ge: return a >= b;
            case BinOpKind::Shl: {
                if (b < 0 || b > 63) fault("shift amount out of range");
                auto wide = static_cast<__int128>(a) << b;
                if (wide < INT64_MIN || wide > INT64_MAX) fault("overflow in <<");
                return static_cast<std::int64_t>(wide);
            }
            case BinOpKind::Shr:
                if (b < 0 || b > 63) fault("shift amount out of range");
                return a >> b;
            case BinOpKind::BitAnd: return a & b;
            case BinOpKind::BitOr: return a | b;
            case BinOpKind::And:
            case BinOpKind::Or:
                break;  // handled above
        }
        fault("bad operator");
    }

    // First indexed reference in `e` whose index expression mentions `binder`.
    static const Ref* find_indexed_over(const Expr& e, const std::string& binder) {
        auto mentions = [&binder](const Expr& x) {
            bool hit = false;
            std::function<void(const Expr&)> go = [&](const Expr& y) {
                if (hit) return;
                if (y.kind == Expr::Kind::Ref) {
                    if (y.ref.kind == Ref::Kind::Bare && y.ref.id == binder) hit = true;
                    if (y.ref.index) go(*y.ref.index);
                    return;
                }
                if (y.a) go(*y.a);
                if (y.b) go(*y.b);
                if (y.c) go(*y.c);
            };
            go(x);
            return hit;
        };
        const Ref* found = nullptr;
        std::function<void(const Expr&)> go = [&](const Expr& x) {
            if (found) return;
            if (x.kind == Expr::Kind::Ref) {
                if (x.ref.index) {
                    if (mentions(*x.ref.index)) {
                        found = &x.ref;
                        return;
                    }
                    go(*x.ref.index);
                }
                return;
            }
            if (x.a) go(*x.a);
            if (x.b) go(*x.b);
            if (x.c) go(*x.c);
        };
        go(e);
        return found;
    }

    std::int64_t eval_exists(Frame& f, const Expr& e) {
        const Ref* indexed = find_indexed_over(*e.a, e.binder);
        if (!indexed) fault("existential with no indexed reference over its binder");
        const TreePtr* slot = find_result(f, indexed->nt);
        if (!slot || !*slot || (*slot)->kind != Tree::Kind::Array)
            fault("existential over '" + indexed->nt + "' which is not a parsed array");
        const Tree& arr = **slot;
        auto count = static_cast<std::int64_t>(arr.children.size());
        for (std::int64_t v = arr.loop_start; v < arr.loop_start + count; ++v) {
            f.binders.emplace_back(e.binder, v);
            bool hit = eval(f, *e.a) != 0;
            std::int64_t then_val = hit ? eval(f, *e.b) : 0;
            f.binders.pop_back();
            if (hit) return then_val;
        }
        return eval(f, *e.c);
    }

    // Result slot a qualified/indexed reference binds to, searching the
    // current frame and then the invoking frames (local-rule capture).
    const TreePtr* find_result(Frame& f, const std::string& nt) {
        Frame* fr = &f;
        int before = f.current;
        while (fr) {
            int j = resolve_nt_term(*fr->alt, before, nt);
            if (j >= 0) return &fr->results[static_cast<std::size_t>(j)];
            before = fr->outer_before;
            fr = fr->outer;
        }
        return nullptr;
    }

    std::int64_t node_field(const Tree& node, Ref::Kind kind, const std::string& id) {
        if (node.kind != Tree::Kind::Node) fault("reference into a non-node tree");
        switch (kind) {
            case Ref::Kind::Qual:
            case Ref::Kind::Indexed: {
                auto it = node.env.find(id);
                if (it == node.env.end())
                    fault("node '" + node.nt + "' has no attribute '" + id + "'");
                return it->second;
            }
            case Ref::Kind::QualStart:
            case Ref::Kind::IndexedStart:
                return node.env.at("start");
            default:
                return node.env.at("end");
        }
    }

    std::int64_t ref_value(Frame& f, const Ref& ref) {
        switch (ref.kind) {
            case Ref::Kind::EOI:
                return f.env.at("EOI");
            case Ref::Kind::Bare: {
                for (Frame* fr = &f; fr; fr = fr->outer) {
                    for (auto it = fr->binders.rbegin(); it != fr->binders.rend(); ++it)
                        if (it->first == ref.id) return it->second;
                    auto it = fr->env.find(ref.id);
                    if (it != fr->env.end()) return it->second;
                }
                fault("unbound name '" + ref.id + "'");
            }
            case Ref::Kind::Qual:
            case Ref::Kind::QualStart:
            case Ref::Kind::QualEnd: {
                const TreePtr* slot = find_result(f, ref.nt);
                if (!slot) fault("no term '" + ref.nt + "' in scope");
                if (!*slot) fault("term '" + ref.nt + "' not yet parsed");
                return node_field(**slot, ref.kind, ref.id);
            }
            case Ref::Kind::Indexed:
            case Ref::Kind::IndexedStart:
            case Ref::Kind::IndexedEnd: {
                const TreePtr* slot = find_result(f, ref.nt);
                if (!slot || !*slot) fault("no array '" + ref.nt + "' in scope");
                if ((*slot)->kind != Tree::Kind::Array)
                    fault("'" + ref.nt + "' is not an array");
                const Tree& arr = **slot;
                std::int64_t idx = eval(f, *ref.index);
                std::int64_t pos = idx - arr.loop_start;
                if (pos < 0 || pos >= static_cast<std::int64_t>(arr.children.size()))
                    fault("array index out of range for '" + ref.nt + "'");
                return node_field(*arr.children[static_cast<std::size_t>(pos)],
                                  ref.kind, ref.id);
            }
        }
        fault("bad reference");
    }

    struct MemoKey {
        std::string nt;
        std::size_t l, r;
        bool operator<(const MemoKey& o) const {
            if (l != o.l) return l < o.l;
            if (r != o.r) return r < o.r;
            return nt < o.nt;
        }
    };

    const std::uint8_t* data_;
    std::size_t size_;
    const Grammar& g_;
    const EngineOptions& opts_;
    const BlackboxRegistry& reg_;
    std::map<MemoKey, TreePtr> memo_;
    ParseStats stats_;
    std::size_t depth_ = 0;
    std::size_t max_depth_;
    std::ostream* trace_ = nullptr;
};

}  // namespace

ParseOutcome parse(const std::uint8_t* data, std::size_t size, const Grammar& g,
                   const std::string& start_nt, const EngineOptions& opts,
                   const BlackboxRegistry* registry) {
    static const BlackboxRegistry builtin_only = BlackboxRegistry::with_builtins();
    const BlackboxRegistry& reg = registry ? *registry : builtin_only;
    std::string start = start_nt;
    if (start.empty()) {
        if (!g.start.empty())
            start = g.start;
        else if (!g.rules.empty())
            start = g.rules.front().name;
        else
            throw EngineError("grammar has no rules");
    }
    Interp interp(data, size, g, opts, reg);
    return interp.run(start);
}

ParseOutcome parse(const std::vector<std::uint8_t>& input, const Grammar& g,
                   const std::string& start_nt, const EngineOptions& opts,
                   const BlackboxRegistry* registry) {
    return parse(input.data(), input.size(), g, start_nt, opts, registry);
}

ParseOutcome parse(const std::string& input, const Grammar& g,
                   const std::string& start_nt, const EngineOptions& opts,
                   const BlackboxRegistry* registry) {
    return parse(reinterpret_cast<const std::uint8_t*>(input.data()), input.size(),
                 g, start_nt, opts, registry);
}

}  // namespace ipg
