#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ipg/ast.hpp"

namespace ipg {

// Nonterminal dependency multigraph. Vertices are qualified rule names
// ("A", "Outer.Local"), builtins and externals; one edge per interval-carrying
// nonterminal occurrence, labeled with its symbolic interval.
struct NTEdge {
    int from = 0;  // vertex indices
    int to = 0;
    ExprPtr lo, hi;
    // Nonterminal names mentioned by the label, resolved to qualified names
    // in the scope of `from` (for the consumer end >= 1 extension).
    std::map<std::string, std::string> label_targets;
};

struct NTGraph {
    std::vector<std::string> vertices;
    std::vector<NTEdge> edges;

    int vertex(const std::string& name) const;  // -1 if absent
};

NTGraph build_nt_graph(const Grammar& g);

// Least fixpoint of "every alternative consumes at least one byte".
// Qualified names; builtins Byte/UInt*/AsciiInt are seeds.
std::set<std::string> consumes_terminal(const Grammar& g);

// An elementary cycle as a sequence of edge indices; vertices are distinct
// and the smallest vertex comes first.
struct Cycle {
    std::vector<int> edge_indices;
};

// Every elementary cycle exactly once, deterministically ordered. Sets
// *exceeded when the cap is hit (enumeration stops).
std::vector<Cycle> elementary_cycles(const NTGraph& ng, std::size_t cap = 10000,
                                     bool* exceeded = nullptr);

enum class CycleResult { Pass, Flag, Unknown };

// Satisfiability of (lo_i = 0 and hi_i = EOI) over the cycle, with the
// end >= 1 extension for consumers. Unsatisfiable => Pass (interval shrinks);
// satisfiable => Flag; nonlinear labels or arithmetic overflow => Unknown.
CycleResult cycle_satisfiable(const NTGraph& ng, const Cycle& c,
                              const std::set<std::string>& consumers);

enum class Verdict { Terminates, MayNotTerminate, Unknown };

struct CycleReport {
    std::vector<std::string> path;  // vertex names, cycle order
    std::vector<std::pair<std::string, std::string>> intervals;  // printed labels
    CycleResult result = CycleResult::Pass;
};

struct TerminationReport {
    Verdict verdict = Verdict::Terminates;
    std::vector<CycleReport> cycles;
    double ms = 0.0;
};

TerminationReport check_termination(const Grammar& g, std::size_t cycle_cap = 10000);

const char* verdict_name(Verdict v);

// {"verdict":"...","cycles":[{"path":[...],"intervals":[["l","r"],...],
//  "result":"pass|flag|unknown"}],"ms":1.234}
std::string report_to_json(const TerminationReport& r);

}  // namespace ipg
