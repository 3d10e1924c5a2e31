#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace ipg {

// Byte range into a grammar source file.
struct Span {
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct Diagnostic {
    std::string code;
    std::string message;
    Span span;
};

using Diagnostics = std::vector<Diagnostic>;

// Grammar source plus a line index for span-to-line mapping.
struct SourceText {
    std::string text;
    std::vector<std::size_t> line_starts;

    static SourceText from_string(std::string s);

    // 1-based (line, column) for a byte offset.
    std::pair<int, int> line_col(std::size_t offset) const;
};

std::string format_diagnostics(const Diagnostics& diags, const SourceText& src);

}  // namespace ipg
