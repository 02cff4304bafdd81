// Concrete syntax for PCTL state formulas.
//
// Grammar (whitespace-insensitive, '#' starts a line comment):
//
//   state   ::= conj ('|' conj)*
//   conj    ::= unary ('&' unary)*
//   unary   ::= '!' unary | primary
//   primary ::= 'true' | 'false' | ident | '(' state ')'
//             | 'P' cmp bound '[' path ']'
//   cmp     ::= '<=' | '>=' | '<' | '>' | '='        ('=' only with 0 or 1)
//   bound   ::= number | number '/' number            (value within [0,1])
//   path    ::= 'X' state | 'F' state | 'G' state | state ('U'|'W') state
//
// ident is [a-zA-Z_][a-zA-Z0-9_]* excluding the reserved words
// true false P X U W F G. F/G are sugar and expand on parse.

#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "pctl/errors.hpp"
#include "pctl/formula.hpp"
#include "pctl/normal_form.hpp"

namespace pctl {

namespace detail {

enum class Tok {
    Ident,
    True,
    False,
    KwP,
    KwX,
    KwU,
    KwW,
    KwF,
    KwG,
    Number,
    Not,
    And,
    Or,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Slash,
    CmpLe,
    CmpGe,
    CmpLt,
    CmpGt,
    CmpEq,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

inline std::string token_name(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::True: return "'true'";
        case Tok::False: return "'false'";
        case Tok::KwP: return "'P'";
        case Tok::KwX: return "'X'";
        case Tok::KwU: return "'U'";
        case Tok::KwW: return "'W'";
        case Tok::KwF: return "'F'";
        case Tok::KwG: return "'G'";
        case Tok::Number: return "number";
        case Tok::Not: return "'!'";
        case Tok::And: return "'&'";
        case Tok::Or: return "'|'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Slash: return "'/'";
        case Tok::CmpLe: return "'<='";
        case Tok::CmpGe: return "'>='";
        case Tok::CmpLt: return "'<'";
        case Tok::CmpGt: return "'>'";
        case Tok::CmpEq: return "'='";
        case Tok::End: return "end of input";
    }
    return "?";
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            std::size_t start = pos_;
            if (pos_ >= text_.size()) {
                out.push_back({Tok::End, "", {start, start}});
                return out;
            }
            char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    ++pos_;
                std::string word(text_.substr(start, pos_ - start));
                out.push_back({keyword(word), word, {start, pos_}});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                bool dot = false;
                while (pos_ < text_.size() &&
                       (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                        (!dot && text_[pos_] == '.'))) {
                    if (text_[pos_] == '.') dot = true;
                    ++pos_;
                }
                std::string word(text_.substr(start, pos_ - start));
                if (word == ".") throw ParseError("malformed number", {start, pos_});
                out.push_back({Tok::Number, word, {start, pos_}});
                continue;
            }
            ++pos_;
            switch (c) {
                case '!': out.push_back({Tok::Not, "!", {start, pos_}}); continue;
                case '&': out.push_back({Tok::And, "&", {start, pos_}}); continue;
                case '|': out.push_back({Tok::Or, "|", {start, pos_}}); continue;
                case '(': out.push_back({Tok::LParen, "(", {start, pos_}}); continue;
                case ')': out.push_back({Tok::RParen, ")", {start, pos_}}); continue;
                case '[': out.push_back({Tok::LBracket, "[", {start, pos_}}); continue;
                case ']': out.push_back({Tok::RBracket, "]", {start, pos_}}); continue;
                case '/': out.push_back({Tok::Slash, "/", {start, pos_}}); continue;
                case '<':
                    if (pos_ < text_.size() && text_[pos_] == '=') {
                        ++pos_;
                        out.push_back({Tok::CmpLe, "<=", {start, pos_}});
                    } else {
                        out.push_back({Tok::CmpLt, "<", {start, pos_}});
                    }
                    continue;
                case '>':
                    if (pos_ < text_.size() && text_[pos_] == '=') {
                        ++pos_;
                        out.push_back({Tok::CmpGe, ">=", {start, pos_}});
                    } else {
                        out.push_back({Tok::CmpGt, ">", {start, pos_}});
                    }
                    continue;
                case '=': out.push_back({Tok::CmpEq, "=", {start, pos_}}); continue;
                default:
                    throw ParseError(std::string("unexpected character '") + c + "'", {start, pos_});
            }
        }
    }

private:
    void skip_trivia() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    static Tok keyword(const std::string& word) {
        if (word == "true") return Tok::True;
        if (word == "false") return Tok::False;
        if (word == "P") return Tok::KwP;
        if (word == "X") return Tok::KwX;
        if (word == "U") return Tok::KwU;
        if (word == "W") return Tok::KwW;
        if (word == "F") return Tok::KwF;
        if (word == "G") return Tok::KwG;
        return Tok::Ident;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

class FormulaParser {
public:
    explicit FormulaParser(std::string_view text) : tokens_(Lexer(text).run()) {}

    StateFormula parse() {
        StateFormula phi = parse_or();
        expect(Tok::End);
        return phi;
    }

private:
    const Token& peek() const { return tokens_[idx_]; }
    Token advance() { return tokens_[idx_++]; }

    Token expect(Tok kind) {
        if (peek().kind != kind)
            throw ParseError("expected " + token_name(kind) + ", found " + token_name(peek().kind),
                             peek().span);
        return advance();
    }

    StateFormula parse_or() {
        StateFormula lhs = parse_and();
        while (peek().kind == Tok::Or) {
            advance();
            lhs = f_or(lhs, parse_and());
        }
        return lhs;
    }

    StateFormula parse_and() {
        StateFormula lhs = parse_unary();
        while (peek().kind == Tok::And) {
            advance();
            lhs = f_and(lhs, parse_unary());
        }
        return lhs;
    }

    StateFormula parse_unary() {
        if (peek().kind == Tok::Not) {
            advance();
            return f_not(parse_unary());
        }
        return parse_primary();
    }

    StateFormula parse_primary() {
        const Token& tok = peek();
        switch (tok.kind) {
            case Tok::True:
                advance();
                return f_true();
            case Tok::False:
                advance();
                return f_false();
            case Tok::Ident:
                return atom(advance().text);
            case Tok::LParen: {
                advance();
                StateFormula inner = parse_or();
                expect(Tok::RParen);
                return inner;
            }
            case Tok::KwP:
                return parse_prob();
            default:
                throw ParseError("expected a state formula, found " + token_name(tok.kind),
                                 tok.span);
        }
    }

    StateFormula parse_prob() {
        expect(Tok::KwP);
        Token cmp_tok = advance();
        Comparison cmp;
        bool eq = false;
        switch (cmp_tok.kind) {
            case Tok::CmpLe: cmp = Comparison::Le; break;
            case Tok::CmpGe: cmp = Comparison::Ge; break;
            case Tok::CmpLt: cmp = Comparison::Lt; break;
            case Tok::CmpGt: cmp = Comparison::Gt; break;
            case Tok::CmpEq: cmp = Comparison::Ge; eq = true; break;
            default:
                throw ParseError("expected a comparison after 'P', found " +
                                     token_name(cmp_tok.kind),
                                 cmp_tok.span);
        }
        auto [bound, span] = parse_bound();
        if (bound < Rational(0) || bound > Rational(1))
            throw BoundOutOfRangeError("probability bound " + bound.to_string() +
                                           " outside [0,1]",
                                       span);
        if (eq) {
            // P=1 reads as P>=1 and P=0 as P<=0; other exact bounds are
            // not expressible with a single comparison.
            if (bound == Rational(1)) {
                cmp = Comparison::Ge;
            } else if (bound == Rational(0)) {
                cmp = Comparison::Le;
            } else {
                throw ParseError("'P=' supports only the bounds 0 and 1", span);
            }
        }
        expect(Tok::LBracket);
        PathFormula path = parse_path();
        expect(Tok::RBracket);
        return prob(cmp, bound, path);
    }

    std::pair<Rational, SourceSpan> parse_bound() {
        Token num = expect(Tok::Number);
        SourceSpan span = num.span;
        if (peek().kind == Tok::Slash) {
            advance();
            Token den = expect(Tok::Number);
            span.end = den.span.end;
            if (num.text.find('.') != std::string::npos ||
                den.text.find('.') != std::string::npos)
                throw ParseError("fractional bounds require integer numerator and denominator",
                                 span);
            auto d = Rational::parse(den.text);
            if (!d || d->is_zero()) throw ParseError("zero denominator", den.span);
            auto n = Rational::parse(num.text);
            if (!n) throw ParseError("malformed number", num.span);
            return {*n / *d, span};
        }
        auto value = Rational::parse(num.text);
        if (!value) throw ParseError("malformed number", num.span);
        return {*value, span};
    }

    PathFormula parse_path() {
        switch (peek().kind) {
            case Tok::KwX:
                advance();
                return next(parse_or());
            case Tok::KwF:
                advance();
                return eventually(parse_or());
            case Tok::KwG:
                advance();
                return globally(parse_or());
            default: {
                StateFormula lhs = parse_or();
                if (peek().kind == Tok::KwU) {
                    advance();
                    return until(lhs, parse_or());
                }
                if (peek().kind == Tok::KwW) {
                    advance();
                    return weak_until(lhs, parse_or());
                }
                throw ParseError("expected 'U' or 'W' in path formula, found " +
                                     token_name(peek().kind),
                                 peek().span);
            }
        }
    }

    std::vector<Token> tokens_;
    std::size_t idx_ = 0;
};

} // namespace detail

inline StateFormula parse_formula(std::string_view text) {
    return detail::FormulaParser(text).parse();
}

// One formula per non-empty line; '#' comments.
inline std::vector<StateFormula> parse_formula_file(std::string_view text) {
    std::vector<StateFormula> out;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = text.size();
        std::string_view line = text.substr(line_start, line_end - line_start);
        std::string_view stripped = line.substr(0, line.find('#'));
        bool blank = true;
        for (char c : stripped)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (!blank) {
            try {
                out.push_back(parse_formula(stripped));
            } catch (const ParseError& e) {
                SourceSpan shifted{line_start + e.span().start, line_start + e.span().end};
                throw ParseError(e.what(), shifted);
            }
        }
        if (line_end == text.size()) break;
        line_start = line_end + 1;
    }
    return out;
}

namespace detail {

std::string print_state(const StateFormula& phi);

inline std::string print_path(const PathFormula& p) {
    auto arg_str = [](const StateFormula& s) {
        std::string inner = print_state(s);
        if (s.kind() == StateFormula::Kind::And || s.kind() == StateFormula::Kind::Or)
            return "(" + inner + ")";
        return inner;
    };
    switch (p.kind()) {
        case PathFormula::Kind::Next:
            return "X " + arg_str(p.arg());
        case PathFormula::Kind::Until:
            if (p.lhs().is_true()) return "F " + arg_str(p.rhs());
            return print_state(p.lhs()) + " U " + print_state(p.rhs());
        case PathFormula::Kind::WeakUntil:
            if (p.rhs().is_false()) return "G " + arg_str(p.lhs());
            return print_state(p.lhs()) + " W " + print_state(p.rhs());
    }
    return "";
}

inline std::string print_state(const StateFormula& phi) {
    switch (phi.kind()) {
        case StateFormula::Kind::True:
            return "true";
        case StateFormula::Kind::False:
            return "false";
        case StateFormula::Kind::Atom:
            return phi.atom_name();
        case StateFormula::Kind::Not: {
            std::string inner = print_state(phi.inner());
            if (phi.inner().kind() == StateFormula::Kind::And ||
                phi.inner().kind() == StateFormula::Kind::Or)
                return "!(" + inner + ")";
            return "!" + inner;
        }
        case StateFormula::Kind::And: {
            // parenthesise a right-nested conjunction so reparsing keeps
            // the association
            auto side = [](const StateFormula& s, bool rhs) {
                std::string str = print_state(s);
                if (s.kind() == StateFormula::Kind::Or ||
                    (rhs && s.kind() == StateFormula::Kind::And))
                    return "(" + str + ")";
                return str;
            };
            return side(phi.lhs(), false) + " & " + side(phi.rhs(), true);
        }
        case StateFormula::Kind::Or: {
            std::string rhs = print_state(phi.rhs());
            if (phi.rhs().kind() == StateFormula::Kind::Or) rhs = "(" + rhs + ")";
            return print_state(phi.lhs()) + " | " + rhs;
        }
        case StateFormula::Kind::Prob:
            return "P" + comparison_symbol(phi.cmp()) + phi.bound().to_decimal_or_fraction() +
                   "[" + print_path(phi.path()) + "]";
    }
    return "";
}

} // namespace detail

// Deterministic rendering; parse_formula(print_formula(phi)) is
// structurally equal to phi.
inline std::string print_formula(const StateFormula& phi) { return detail::print_state(phi); }

} // namespace pctl
