#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ipg/check.hpp"
#include "ipg/engine.hpp"
#include "ipg/frontend.hpp"
#include "ipg/terminate.hpp"

namespace {

// Exit codes are a stable contract (see README).
constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitIo = 2;
constexpr int kExitMayNotTerminate = 3;
constexpr int kExitUnknown = 4;
constexpr int kExitReject = 5;
constexpr int kExitDepth = 6;

bool read_file(const std::string& path, std::string& out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return false;
    std::ostringstream ss;
    ss << f.rdbuf();
    out = ss.str();
    return f.good() || f.eof();
}

int load_checked(const std::string& path, ipg::PipelineResult& result) {
    std::string text;
    if (!read_file(path, text)) {
        std::cerr << "error: cannot read " << path << "\n";
        return kExitIo;
    }
    auto src = ipg::SourceText::from_string(std::move(text));
    result = ipg::load_grammar(src);
    if (!result.ok()) {
        std::cerr << ipg::format_diagnostics(result.diagnostics, src);
        return kExitDiagnostics;
    }
    return kExitOk;
}

int cmd_check(const std::string& path, bool emit_completed, bool emit_reordered) {
    ipg::PipelineResult res;
    int rc = load_checked(path, res);
    if (rc != kExitOk) return rc;
    if (emit_completed) std::cout << ipg::pretty_print(res.grammar);
    if (emit_reordered) {
        for (const auto& r : res.grammar.rules) {
            for (const auto& alt : r.alternatives)
                std::cout << r.name << ": "
                          << ipg::pretty_print_alternative(alt, true) << "\n";
        }
    }
    return kExitOk;
}

int cmd_terminate(const std::string& path) {
    ipg::PipelineResult res;
    int rc = load_checked(path, res);
    if (rc != kExitOk) return rc;
    auto report = ipg::check_termination(res.grammar);
    std::cout << ipg::report_to_json(report) << "\n";
    switch (report.verdict) {
        case ipg::Verdict::Terminates: return kExitOk;
        case ipg::Verdict::MayNotTerminate: return kExitMayNotTerminate;
        case ipg::Verdict::Unknown: return kExitUnknown;
    }
    return kExitUnknown;
}

int cmd_parse(const std::string& grammar_path, const std::string& input_path,
              const std::string& start, const ipg::EngineOptions& opts,
              bool stats) {
    ipg::PipelineResult res;
    int rc = load_checked(grammar_path, res);
    if (rc != kExitOk) return rc;
    std::string input;
    if (!read_file(input_path, input)) {
        std::cerr << "error: cannot read " << input_path << "\n";
        return kExitIo;
    }
    try {
        auto outcome = ipg::parse(input, res.grammar, start, opts);
        if (stats) std::cerr << ipg::stats_to_json(outcome.stats) << "\n";
        if (!outcome.success) return kExitReject;
        std::cout << ipg::tree_to_json(*outcome.tree) << "\n";
        return kExitOk;
    } catch (const ipg::DepthExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDepth;
    } catch (const ipg::StrictEvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitReject;
    } catch (const ipg::EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnknown;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval-grammar toolkit: check, termination analysis, parse"};
    app.require_subcommand(1);

    std::string grammar_path, input_path, start_nt;
    bool emit_completed = false, emit_reordered = false;
    bool no_memo = false, strict_eval = false, stats = false, trace = false;
    std::size_t max_depth = 0;

    auto* check = app.add_subcommand("check", "Validate a grammar file");
    check->add_option("grammar", grammar_path, "Grammar file (.ipg)")->required();
    check->add_flag("--emit-completed", emit_completed,
                    "Print the grammar with auto-completed intervals");
    check->add_flag("--emit-reordered", emit_reordered,
                    "Print each alternative in attribute evaluation order");

    auto* term = app.add_subcommand("terminate", "Run the termination checker");
    term->add_option("grammar", grammar_path, "Grammar file (.ipg)")->required();

    auto* parse = app.add_subcommand("parse", "Parse a binary input to a JSON tree");
    parse->add_option("grammar", grammar_path, "Grammar file (.ipg)")->required();
    parse->add_option("input", input_path, "Input file (raw bytes)")->required();
    parse->add_option("--start", start_nt, "Start nonterminal (default: first rule)");
    parse->add_flag("--no-memo", no_memo, "Disable memoization");
    parse->add_option("--max-depth", max_depth, "Recursion depth guard");
    parse->add_flag("--strict-eval", strict_eval,
                    "Abort on expression faults instead of failing the alternative");
    parse->add_flag("--stats", stats, "Print run statistics to stderr");
    parse->add_flag("--trace", trace, "Trace nonterminal invocations to stderr");

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) return cmd_check(grammar_path, emit_completed, emit_reordered);
    if (term->parsed()) return cmd_terminate(grammar_path);
    ipg::EngineOptions opts;
    opts.memo = !no_memo;
    opts.max_depth = max_depth;
    opts.strict_eval = strict_eval;
    opts.trace = trace;
    return cmd_parse(grammar_path, input_path, start_nt, opts, stats);
}
