#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipg/ast.hpp"
#include "ipg/check.hpp"

namespace ipg {

// Parse tree. Node environments hold every attribute including the special
// EOI/start/end keys; start and end are stored already rebased into the
// parent's coordinate space (one level).
struct Tree;
using TreePtr = std::shared_ptr<const Tree>;

struct Tree {
    enum class Kind { Node, Array, Leaf };
    Kind kind = Kind::Leaf;

    // Node
    std::string nt;
    std::map<std::string, std::int64_t> env;
    // Node children (textual term order) or Array elements
    std::vector<TreePtr> children;
    // Array: loop value of the first element (indexed refs subtract it)
    std::int64_t loop_start = 0;
    // Leaf: the matched bytes
    std::vector<std::uint8_t> bytes;

    std::int64_t attr(const std::string& name) const;   // throws if absent
    bool has_attr(const std::string& name) const;

    static TreePtr node(std::string nt, std::map<std::string, std::int64_t> env,
                        std::vector<TreePtr> children);
    static TreePtr array(std::vector<TreePtr> elems, std::int64_t loop_start);
    static TreePtr leaf(std::vector<std::uint8_t> bytes);
};

// Structural equality including environments.
bool tree_equal(const Tree& a, const Tree& b);
bool tree_equal(const TreePtr& a, const TreePtr& b);

// Blackbox parsers receive a byte slice and report how much they consumed
// (relative to the slice) plus synthesized attributes.
struct BlackboxResult {
    bool ok = false;
    std::size_t consumed_end = 0;
    std::map<std::string, std::int64_t> attrs;
};
using BlackboxFn = std::function<BlackboxResult(const std::uint8_t*, std::size_t)>;

class BlackboxRegistry {
  public:
    // Registry pre-populated with Byte, UInt16LE, UInt32LE, UInt64LE,
    // UInt16BE, UInt32BE, AsciiInt and Raw.
    static BlackboxRegistry with_builtins();

    bool add(const std::string& name, BlackboxFn fn);  // false on duplicate
    const BlackboxFn* find(const std::string& name) const;

  private:
    std::map<std::string, BlackboxFn> fns_;
};

struct EngineOptions {
    bool memo = true;
    std::size_t max_depth = 0;  // 0: max(4096, |rules| * (|input|+1))
    bool strict_eval = false;   // expression faults abort instead of failing
    bool trace = false;
    std::ostream* trace_out = nullptr;  // defaults to std::cerr when tracing
};

struct ParseStats {
    std::uint64_t invocations = 0;  // nonterminal + builtin invocations
    std::uint64_t memo_hits = 0;
    std::size_t max_depth_seen = 0;
};

struct ParseOutcome {
    bool success = false;
    TreePtr tree;  // set iff success
    ParseStats stats;
};

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Recursion depth guard tripped: possible nontermination.
struct DepthExceededError : EngineError {
    using EngineError::EngineError;
};
// A blackbox reported consumed_end outside its slice.
struct BlackboxContractError : EngineError {
    using EngineError::EngineError;
};
// Expression fault under strict evaluation.
struct StrictEvalError : EngineError {
    using EngineError::EngineError;
};

ParseOutcome parse(const std::uint8_t* data, std::size_t size, const Grammar& g,
                   const std::string& start_nt, const EngineOptions& opts = {},
                   const BlackboxRegistry* registry = nullptr);
ParseOutcome parse(const std::vector<std::uint8_t>& input, const Grammar& g,
                   const std::string& start_nt, const EngineOptions& opts = {},
                   const BlackboxRegistry* registry = nullptr);
ParseOutcome parse(const std::string& input, const Grammar& g,
                   const std::string& start_nt, const EngineOptions& opts = {},
                   const BlackboxRegistry* registry = nullptr);

// Deterministic JSON with fixed field order:
// {"kind":"node","nt":...,"attrs":{...},"start":...,"end":...,"children":[...]}
// {"kind":"array","elems":[...]}
// {"kind":"leaf","bytes":"<lowercase hex>"}
// attrs excludes EOI/start/end; keys sorted.
std::string tree_to_json(const Tree& t);
std::string stats_to_json(const ParseStats& s);

}  // namespace ipg
