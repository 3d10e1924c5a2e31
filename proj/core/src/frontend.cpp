#include "ipg/frontend.hpp"

#include <cctype>
#include <cstdio>
#include <optional>

namespace ipg {

SourceText SourceText::from_string(std::string s) {
    SourceText src;
    src.text = std::move(s);
    src.line_starts.push_back(0);
    for (std::size_t i = 0; i < src.text.size(); ++i)
        if (src.text[i] == '\n') src.line_starts.push_back(i + 1);
    return src;
}

std::pair<int, int> SourceText::line_col(std::size_t offset) const {
    std::size_t lo = 0, hi = line_starts.size();
    while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (line_starts[mid] <= offset)
            lo = mid;
        else
            hi = mid;
    }
    return {static_cast<int>(lo) + 1, static_cast<int>(offset - line_starts[lo]) + 1};
}

std::string format_diagnostics(const Diagnostics& diags, const SourceText& src) {
    std::string out;
    for (const auto& d : diags) {
        auto [line, col] = src.line_col(d.span.offset);
        out += std::to_string(line) + ":" + std::to_string(col) + ": " + d.code +
               ": " + d.message + "\n";
    }
    return out;
}

namespace {

enum class Tok {
    Ident, Int, String,
    Arrow, LBracket, RBracket, LBrace, RBrace, LParen, RParen,
    Comma, Semi, Slash, Question, Colon, Dot,
    Assign, Eq, Ne, Lt, Gt, Le, Ge, AndAnd, OrOr, Amp, Pipe, Shl, Shr,
    Plus, Minus, Star,
    KwFor, KwTo, KwDo, KwSwitch, KwDefault, KwWhere, KwExternal, KwExists, KwMod,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;                // Ident
    std::int64_t value = 0;          // Int
    std::vector<std::uint8_t> bytes; // String
    Span span;
};

class Lexer {
  public:
    Lexer(const std::string& text, Diagnostics& diags) : text_(text), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            Token t = next();
            bool end = t.kind == Tok::End;
            out.push_back(std::move(t));
            if (end) break;
        }
        return out;
    }

  private:
    void error(const char* code, std::string msg, std::size_t at, std::size_t len = 1) {
        diags_.push_back({code, std::move(msg), {at, len}});
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    Token next() {
        skip_ws();
        Token t;
        t.span.offset = pos_;
        if (pos_ >= text_.size()) return t;
        char c = text_[pos_];
        auto one = [&](Tok k) {
            t.kind = k;
            ++pos_;
            t.span.length = 1;
            return t;
        };
        auto two = [&](Tok k) {
            t.kind = k;
            pos_ += 2;
            t.span.length = 2;
            return t;
        };
        auto peek2 = [&](char n) { return pos_ + 1 < text_.size() && text_[pos_ + 1] == n; };

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            t.text = text_.substr(start, pos_ - start);
            t.span.length = pos_ - start;
            if (t.text == "for") t.kind = Tok::KwFor;
            else if (t.text == "to") t.kind = Tok::KwTo;
            else if (t.text == "do") t.kind = Tok::KwDo;
            else if (t.text == "switch") t.kind = Tok::KwSwitch;
            else if (t.text == "default") t.kind = Tok::KwDefault;
            else if (t.text == "where") t.kind = Tok::KwWhere;
            else if (t.text == "external") t.kind = Tok::KwExternal;
            else if (t.text == "exists") t.kind = Tok::KwExists;
            else if (t.text == "mod") t.kind = Tok::KwMod;
            else t.kind = Tok::Ident;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            std::int64_t v = 0;
            if (c == '0' && peek2('x')) {
                pos_ += 2;
                while (pos_ < text_.size() &&
                       std::isxdigit(static_cast<unsigned char>(text_[pos_]))) {
                    char d = text_[pos_++];
                    int dv = std::isdigit(static_cast<unsigned char>(d))
                                 ? d - '0'
                                 : std::tolower(d) - 'a' + 10;
                    v = v * 16 + dv;
                }
            } else {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    v = v * 10 + (text_[pos_++] - '0');
            }
            t.kind = Tok::Int;
            t.value = v;
            t.span.length = pos_ - start;
            return t;
        }
        if (c == '"') {
            std::size_t start = pos_++;
            std::vector<std::uint8_t> bytes;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                char d = text_[pos_];
                if (d == '\\') {
                    if (pos_ + 1 >= text_.size()) break;
                    char e = text_[pos_ + 1];
                    if (e == 'x') {
                        if (pos_ + 3 < text_.size() &&
                            std::isxdigit(static_cast<unsigned char>(text_[pos_ + 2])) &&
                            std::isxdigit(static_cast<unsigned char>(text_[pos_ + 3]))) {
                            auto hex = [](char h) {
                                return std::isdigit(static_cast<unsigned char>(h))
                                           ? h - '0'
                                           : std::tolower(h) - 'a' + 10;
                            };
                            bytes.push_back(static_cast<std::uint8_t>(
                                hex(text_[pos_ + 2]) * 16 + hex(text_[pos_ + 3])));
                            pos_ += 4;
                        } else {
                            error("BAD_ESCAPE", "invalid \\x escape", pos_, 2);
                            pos_ += 2;
                        }
                    } else if (e == '\\') { bytes.push_back('\\'); pos_ += 2; }
                    else if (e == '"') { bytes.push_back('"'); pos_ += 2; }
                    else if (e == 'n') { bytes.push_back('\n'); pos_ += 2; }
                    else if (e == '0') { bytes.push_back(0); pos_ += 2; }
                    else {
                        error("BAD_ESCAPE",
                              std::string("unknown escape '\\") + e + "'", pos_, 2);
                        pos_ += 2;
                    }
                } else {
                    bytes.push_back(static_cast<std::uint8_t>(d));
                    ++pos_;
                }
            }
            if (pos_ >= text_.size()) {
                error("SYNTAX_ERR", "unterminated string literal", start);
            } else {
                ++pos_;  // closing quote
            }
            t.kind = Tok::String;
            t.bytes = std::move(bytes);
            t.span.length = pos_ - start;
            return t;
        }
        switch (c) {
            case '-': return peek2('>') ? two(Tok::Arrow) : one(Tok::Minus);
            case '[': return one(Tok::LBracket);
            case ']': return one(Tok::RBracket);
            case '{': return one(Tok::LBrace);
            case '}': return one(Tok::RBrace);
            case '(': return one(Tok::LParen);
            case ')': return one(Tok::RParen);
            case ',': return one(Tok::Comma);
            case ';': return one(Tok::Semi);
            case '/': return one(Tok::Slash);
            case '?': return one(Tok::Question);
            case ':': return one(Tok::Colon);
            case '.': return one(Tok::Dot);
            case '=': return peek2('=') ? two(Tok::Eq) : one(Tok::Assign);
            case '!':
                if (peek2('=')) return two(Tok::Ne);
                break;
            case '<':
                if (peek2('<')) return two(Tok::Shl);
                if (peek2('=')) return two(Tok::Le);
                return one(Tok::Lt);
            case '>':
                if (peek2('>')) return two(Tok::Shr);
                if (peek2('=')) return two(Tok::Ge);
                return one(Tok::Gt);
            case '&': return peek2('&') ? two(Tok::AndAnd) : one(Tok::Amp);
            case '|': return peek2('|') ? two(Tok::OrOr) : one(Tok::Pipe);
            case '+': return one(Tok::Plus);
            case '*': return one(Tok::Star);
            default: break;
        }
        error("SYNTAX_ERR", std::string("unexpected character '") + c + "'", pos_);
        ++pos_;
        return next();
    }

    const std::string& text_;
    Diagnostics& diags_;
    std::size_t pos_ = 0;
};

class Parser {
  public:
    Parser(std::vector<Token> toks, Diagnostics& diags)
        : toks_(std::move(toks)), diags_(diags) {}

    Grammar run() {
        Grammar g;
        while (!at(Tok::End)) {
            if (at(Tok::KwExternal)) {
                parse_external(g);
            } else if (at(Tok::Ident) && cur().text == "start" && peek(1).kind == Tok::Ident &&
                       peek(2).kind == Tok::Semi) {
                advance();
                g.start = cur().text;
                advance();
                expect(Tok::Semi, "';'");
            } else if (at(Tok::Ident)) {
                g.rules.push_back(parse_rule());
            } else {
                error("SYNTAX_ERR", "expected rule or declaration");
                recover();
            }
        }
        return g;
    }

  private:
    const Token& cur() const { return toks_[idx_]; }
    const Token& peek(std::size_t n) const {
        std::size_t i = idx_ + n;
        return toks_[i < toks_.size() ? i : toks_.size() - 1];
    }
    bool at(Tok k) const { return cur().kind == k; }
    void advance() {
        if (idx_ + 1 < toks_.size()) ++idx_;
    }
    bool accept(Tok k) {
        if (at(k)) {
            advance();
            return true;
        }
        return false;
    }
    void expect(Tok k, const char* what) {
        if (!accept(k)) {
            error("SYNTAX_ERR", std::string("expected ") + what);
            recover();
            throw Bail{};
        }
    }
    void error(const char* code, std::string msg) {
        diags_.push_back({code, std::move(msg), cur().span});
    }
    // Skip to just past the next ';' so later rules can still be parsed.
    void recover() {
        while (!at(Tok::End) && !accept(Tok::Semi)) advance();
    }

    struct Bail {};

    void parse_external(Grammar& g) {
        advance();  // external
        try {
            ExternalDecl decl;
            decl.span = cur().span;
            if (!at(Tok::Ident)) {
                error("SYNTAX_ERR", "expected external parser name");
                recover();
                return;
            }
            decl.name = cur().text;
            advance();
            if (accept(Tok::LParen)) {
                while (at(Tok::Ident)) {
                    decl.attrs.push_back(cur().text);
                    advance();
                    if (!accept(Tok::Comma)) break;
                }
                expect(Tok::RParen, "')'");
            }
            expect(Tok::Semi, "';'");
            g.externals.push_back(std::move(decl));
        } catch (Bail&) {}
    }

    Rule parse_rule() {
        Rule r;
        r.span = cur().span;
        r.name = cur().text;
        advance();
        try {
            expect(Tok::Arrow, "'->'");
            parse_rule_body(r);
            expect(Tok::Semi, "';'");
        } catch (Bail&) {}
        return r;
    }

    // Alternatives plus an optional where-clause; stops before ';' (or, for
    // local rules, before the start of the next local rule).
    void parse_rule_body(Rule& r) {
        for (;;) {
            r.alternatives.push_back(parse_alternative());
            if (!accept(Tok::Slash)) break;
        }
        if (accept(Tok::KwWhere)) {
            while (at(Tok::Ident) && peek(1).kind == Tok::Arrow) {
                Rule local;
                local.span = cur().span;
                local.name = cur().text;
                advance();
                advance();  // ->
                parse_rule_body(local);
                r.locals.push_back(std::move(local));
            }
            if (r.locals.empty()) error("SYNTAX_ERR", "expected local rule after 'where'");
        }
    }

    bool at_term_start() const {
        switch (cur().kind) {
            case Tok::String:
            case Tok::LBrace:
            case Tok::KwFor:
            case Tok::KwSwitch:
                return true;
            case Tok::Ident:
                return peek(1).kind != Tok::Arrow;  // next local rule
            default:
                return false;
        }
    }

    Alternative parse_alternative() {
        Alternative alt;
        alt.span = cur().span;
        while (at_term_start()) alt.terms.push_back(parse_term());
        if (alt.terms.empty()) {
            error("EMPTY_ALT", "alternative has no terms");
            throw Bail{};
        }
        return alt;
    }

    Interval parse_interval_opt() {
        if (!accept(Tok::LBracket)) return Interval::missing();
        ExprPtr first = parse_expr();
        if (accept(Tok::Comma)) {
            ExprPtr second = parse_expr();
            expect(Tok::RBracket, "']'");
            return Interval::full(std::move(first), std::move(second));
        }
        expect(Tok::RBracket, "']'");
        return Interval::length_only(std::move(first));
    }

    Term parse_term() {
        Term t;
        t.span = cur().span;
        if (at(Tok::Ident)) {
            t.kind = Term::Kind::NT;
            t.name = cur().text;
            advance();
            t.interval = parse_interval_opt();
            return t;
        }
        if (at(Tok::String)) {
            t.kind = Term::Kind::Terminal;
            t.bytes = cur().bytes;
            advance();
            t.interval = parse_interval_opt();
            return t;
        }
        if (accept(Tok::LBrace)) {
            if (accept(Tok::Question)) {
                t.kind = Term::Kind::Predicate;
                t.expr = parse_expr();
                expect(Tok::RBrace, "'}'");
                return t;
            }
            t.kind = Term::Kind::AttrDef;
            if (!at(Tok::Ident)) {
                error("SYNTAX_ERR", "expected attribute name");
                throw Bail{};
            }
            t.name = cur().text;
            advance();
            expect(Tok::Assign, "'='");
            t.expr = parse_expr();
            expect(Tok::RBrace, "'}'");
            return t;
        }
        if (accept(Tok::KwFor)) {
            t.kind = Term::Kind::ForArray;
            if (!at(Tok::Ident)) {
                error("SYNTAX_ERR", "expected loop variable");
                throw Bail{};
            }
            t.name = cur().text;
            advance();
            expect(Tok::Assign, "'='");
            t.from = parse_expr();
            expect(Tok::KwTo, "'to'");
            t.to = parse_expr();
            expect(Tok::KwDo, "'do'");
            if (!at(Tok::Ident)) {
                error("SYNTAX_ERR", "expected array element nonterminal");
                throw Bail{};
            }
            t.elem_name = cur().text;
            advance();
            t.elem_interval = parse_interval_opt();
            return t;
        }
        if (accept(Tok::KwSwitch)) {
            t.kind = Term::Kind::Switch;
            expect(Tok::LParen, "'('");
            bool have_default = false;
            for (;;) {
                if (accept(Tok::KwDefault)) {
                    expect(Tok::Colon, "':'");
                    if (!at(Tok::Ident)) {
                        error("SYNTAX_ERR", "expected nonterminal in switch branch");
                        throw Bail{};
                    }
                    t.default_branch.name = cur().text;
                    advance();
                    t.default_branch.interval = parse_interval_opt();
                    have_default = true;
                    break;
                }
                SwitchBranch br;
                br.cond = parse_expr();
                expect(Tok::Colon, "':'");
                if (!at(Tok::Ident)) {
                    error("SYNTAX_ERR", "expected nonterminal in switch branch");
                    throw Bail{};
                }
                br.name = cur().text;
                advance();
                br.interval = parse_interval_opt();
                t.branches.push_back(std::move(br));
                if (!accept(Tok::Slash)) break;
            }
            if (!have_default) {
                error("SYNTAX_ERR", "switch requires a default branch");
                throw Bail{};
            }
            expect(Tok::RParen, "')'");
            return t;
        }
        error("SYNTAX_ERR", "expected term");
        throw Bail{};
    }

    // Expressions: ternary/exists < || < && < comparisons < | < & < shifts
    // < additive < multiplicative.
    ExprPtr parse_expr() {
        if (accept(Tok::KwExists)) {
            if (!at(Tok::Ident)) {
                error("SYNTAX_ERR", "expected existential binder");
                throw Bail{};
            }
            std::string binder = cur().text;
            advance();
            expect(Tok::Dot, "'.'");
            ExprPtr c = parse_or();
            expect(Tok::Question, "'?'");
            ExprPtr t = parse_expr();
            expect(Tok::Colon, "':'");
            ExprPtr e = parse_expr();
            return Expr::exists(std::move(binder), std::move(c), std::move(t), std::move(e));
        }
        ExprPtr c = parse_or();
        if (accept(Tok::Question)) {
            ExprPtr t = parse_expr();
            expect(Tok::Colon, "':'");
            ExprPtr e = parse_expr();
            return Expr::cond(std::move(c), std::move(t), std::move(e));
        }
        return c;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (accept(Tok::OrOr)) lhs = Expr::binop(BinOpKind::Or, lhs, parse_and());
        return lhs;
    }
    ExprPtr parse_and() {
        ExprPtr lhs = parse_cmp();
        while (accept(Tok::AndAnd)) lhs = Expr::binop(BinOpKind::And, lhs, parse_cmp());
        return lhs;
    }
    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_bitor();
        for (;;) {
            BinOpKind op;
            if (at(Tok::Eq)) op = BinOpKind::Eq;
            else if (at(Tok::Ne)) op = BinOpKind::Ne;
            else if (at(Tok::Lt)) op = BinOpKind::Lt;
            else if (at(Tok::Gt)) op = BinOpKind::Gt;
            else if (at(Tok::Le)) op = BinOpKind::Le;
            else if (at(Tok::Ge)) op = BinOpKind::Ge;
            else return lhs;
            advance();
            lhs = Expr::binop(op, lhs, parse_bitor());
        }
    }
    ExprPtr parse_bitor() {
        ExprPtr lhs = parse_bitand();
        while (accept(Tok::Pipe)) lhs = Expr::binop(BinOpKind::BitOr, lhs, parse_bitand());
        return lhs;
    }
    ExprPtr parse_bitand() {
        ExprPtr lhs = parse_shift();
        while (accept(Tok::Amp)) lhs = Expr::binop(BinOpKind::BitAnd, lhs, parse_shift());
        return lhs;
    }
    ExprPtr parse_shift() {
        ExprPtr lhs = parse_add();
        for (;;) {
            if (accept(Tok::Shl)) lhs = Expr::binop(BinOpKind::Shl, lhs, parse_add());
            else if (accept(Tok::Shr)) lhs = Expr::binop(BinOpKind::Shr, lhs, parse_add());
            else return lhs;
        }
    }
    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        for (;;) {
            if (accept(Tok::Plus)) lhs = Expr::binop(BinOpKind::Add, lhs, parse_mul());
            else if (accept(Tok::Minus)) lhs = Expr::binop(BinOpKind::Sub, lhs, parse_mul());
            else return lhs;
        }
    }
    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (accept(Tok::Star)) lhs = Expr::binop(BinOpKind::Mul, lhs, parse_unary());
            else if (accept(Tok::Slash)) lhs = Expr::binop(BinOpKind::Div, lhs, parse_unary());
            else if (accept(Tok::KwMod)) lhs = Expr::binop(BinOpKind::Mod, lhs, parse_unary());
            else return lhs;
        }
    }
    ExprPtr parse_unary() {
        // Unary minus desugars to 0 - e.
        if (accept(Tok::Minus))
            return Expr::binop(BinOpKind::Sub, Expr::int_lit(0), parse_unary());
        return parse_atom();
    }

    ExprPtr parse_atom() {
        if (at(Tok::Int)) {
            auto e = Expr::int_lit(cur().value);
            advance();
            return e;
        }
        if (accept(Tok::LParen)) {
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (at(Tok::Ident)) {
            std::string name = cur().text;
            advance();
            if (name == "EOI") return Expr::make_ref(Ref::eoi());
            if (accept(Tok::Dot)) {
                if (!at(Tok::Ident)) {
                    error("SYNTAX_ERR", "expected attribute name after '.'");
                    throw Bail{};
                }
                std::string id = cur().text;
                advance();
                if (id == "start") return Expr::make_ref(Ref::qual_start(name));
                if (id == "end") return Expr::make_ref(Ref::qual_end(name));
                return Expr::make_ref(Ref::qual(name, std::move(id)));
            }
            if (accept(Tok::LParen)) {
                ExprPtr index = parse_expr();
                expect(Tok::RParen, "')'");
                expect(Tok::Dot, "'.'");
                if (!at(Tok::Ident)) {
                    error("SYNTAX_ERR", "expected attribute name after '.'");
                    throw Bail{};
                }
                std::string id = cur().text;
                advance();
                if (id == "start") return Expr::make_ref(Ref::indexed_start(name, index));
                if (id == "end") return Expr::make_ref(Ref::indexed_end(name, index));
                return Expr::make_ref(Ref::indexed(name, index, std::move(id)));
            }
            return Expr::make_ref(Ref::bare(std::move(name)));
        }
        error("SYNTAX_ERR", "expected expression");
        throw Bail{};
    }

    std::vector<Token> toks_;
    Diagnostics& diags_;
    std::size_t idx_ = 0;
};

}  // namespace

ParseResult parse_grammar(const SourceText& src) {
    ParseResult res;
    Lexer lex(src.text, res.diagnostics);
    Parser parser(lex.run(), res.diagnostics);
    res.grammar = parser.run();
    return res;
}

ParseResult parse_grammar(const std::string& text) {
    return parse_grammar(SourceText::from_string(text));
}

// ---------------------------------------------------------------------------
// Interval auto-completion

namespace {

struct Completer {
    Diagnostics diags;
    CompletionStats stats;

    void count(const Interval& iv) {
        ++stats.total;
        if (iv.kind == Interval::Kind::Missing) ++stats.fully_omitted;
        if (iv.kind == Interval::Kind::LengthOnly) ++stats.length_only;
    }

    // The "previous interval-bearing term" a missing left endpoint is
    // inferred from.
    struct Prev {
        enum class Kind { None, NT, Terminal, Opaque } kind = Kind::None;
        std::string nt_name;  // NT: B.end supplies the left endpoint
        ExprPtr term_right;   // Terminal: its right-endpoint expression
    };

    ExprPtr left_endpoint(const Prev& prev, Span span, bool& ok) {
        ok = true;
        switch (prev.kind) {
            case Prev::Kind::None:
                return Expr::int_lit(0);
            case Prev::Kind::NT:
                return Expr::make_ref(Ref::qual_end(prev.nt_name));
            case Prev::Kind::Terminal:
                return prev.term_right;
            case Prev::Kind::Opaque:
                diags.push_back({"NO_PREV_END",
                                 "cannot infer interval after an array or switch term; "
                                 "write it explicitly",
                                 span});
                ok = false;
                return Expr::int_lit(0);
        }
        return Expr::int_lit(0);
    }

    // is_terminal distinguishes the right-endpoint default: terminals get
    // left + byte length, nonterminals get EOI.
    void complete(Interval& iv, const Prev& prev, bool is_terminal,
                  std::size_t byte_len, Span span) {
        count(iv);
        if (iv.kind == Interval::Kind::Full) return;
        bool ok = false;
        ExprPtr left = left_endpoint(prev, span, ok);
        if (!ok) return;
        ExprPtr right;
        if (iv.kind == Interval::Kind::LengthOnly) {
            right = Expr::folded_add(left, iv.lo);
        } else if (is_terminal) {
            right = Expr::folded_add(left, static_cast<std::int64_t>(byte_len));
        } else {
            right = Expr::make_ref(Ref::eoi());
        }
        iv = Interval::full(std::move(left), std::move(right));
    }

    void complete_alternative(Alternative& alt) {
        Prev prev;
        for (auto& t : alt.terms) {
            switch (t.kind) {
                case Term::Kind::AttrDef:
                case Term::Kind::Predicate:
                    break;  // transparent to the scan
                case Term::Kind::NT:
                    complete(t.interval, prev, false, 0, t.span);
                    prev = {Prev::Kind::NT, t.name, nullptr};
                    break;
                case Term::Kind::Terminal:
                    complete(t.interval, prev, true, t.bytes.size(), t.span);
                    prev = {Prev::Kind::Terminal, "",
                            t.interval.kind == Interval::Kind::Full ? t.interval.hi
                                                                    : nullptr};
                    break;
                case Term::Kind::ForArray:
                    complete(t.elem_interval, prev, false, 0, t.span);
                    prev = {Prev::Kind::Opaque, "", nullptr};
                    break;
                case Term::Kind::Switch:
                    for (auto& br : t.branches)
                        complete(br.interval, prev, false, 0, t.span);
                    complete(t.default_branch.interval, prev, false, 0, t.span);
                    prev = {Prev::Kind::Opaque, "", nullptr};
                    break;
            }
        }
    }

    void complete_rule(Rule& r) {
        for (auto& alt : r.alternatives) complete_alternative(alt);
        for (auto& l : r.locals) complete_rule(l);
    }
};

}  // namespace

CompletionResult complete_intervals(const Grammar& g) {
    CompletionResult res;
    res.grammar = g;
    Completer c;
    for (auto& r : res.grammar.rules) c.complete_rule(r);
    res.diagnostics = std::move(c.diags);
    res.stats = c.stats;
    return res;
}

}  // namespace ipg
