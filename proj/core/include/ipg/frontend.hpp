#pragma once

#include <string>
#include <variant>

#include "ipg/ast.hpp"
#include "ipg/diagnostics.hpp"

namespace ipg {

struct ParseResult {
    Grammar grammar;
    Diagnostics diagnostics;  // non-empty means failure
    bool ok() const { return diagnostics.empty(); }
};

// Parses IPG surface syntax. Intervals may come back Missing or LengthOnly;
// run complete_intervals before checking or interpreting.
ParseResult parse_grammar(const SourceText& src);
ParseResult parse_grammar(const std::string& text);

struct CompletionStats {
    int fully_omitted = 0;  // intervals with no brackets at all
    int length_only = 0;    // intervals given as [length]
    int total = 0;          // interval slots in the grammar
};

struct CompletionResult {
    Grammar grammar;
    Diagnostics diagnostics;
    CompletionStats stats;
    bool ok() const { return diagnostics.empty(); }
};

// Left-to-right interval auto-completion. Idempotent; never touches
// intervals that are already Full.
CompletionResult complete_intervals(const Grammar& g);

}  // namespace ipg
