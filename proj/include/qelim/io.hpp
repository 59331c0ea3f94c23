#pragma once

// S-expression syntax for formulas:
//
//   formula := true | false | atom
//            | (and formula+) | (or formula+) | (not formula)
//            | (=> formula formula)
//            | (exists (var+) formula) | (forall (var+) formula)
//   atom    := (>= term term) | (> term term) | (<= term term) | (< term term) | (= term term)
//   term    := var | rational | (+ term+) | (- term term?) | (* rational term)
//
// '#' starts a comment running to the end of the line. A file may start with
// an optional (declare-vars (x y ...)) header; every free variable of the
// formula must then be declared.

#include "qelim/formula.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qelim {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class UnboundSymbol : public ParseError {
public:
    UnboundSymbol(const Var& v, int line, int column)
        : ParseError("undeclared variable '" + v.name() + "'", line, column), var_(v) {}
    const Var& var() const { return var_; }

private:
    Var var_;
};

namespace detail {

struct Token {
    enum class Kind { Open, Close, Symbol, End } kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            if (pos_ >= src_.size()) {
                out.push_back({Token::Kind::End, "", line_, col_});
                return out;
            }
            char c = src_[pos_];
            if (c == '(' || c == ')') {
                out.push_back({c == '(' ? Token::Kind::Open : Token::Kind::Close, std::string(1, c), line_, col_});
                advance();
                continue;
            }
            int line = line_, col = col_;
            std::size_t start = pos_;
            while (pos_ < src_.size() && !is_delim(src_[pos_])) advance();
            out.push_back({Token::Kind::Symbol, std::string(src_.substr(start, pos_ - start)), line, col});
        }
    }

private:
    static bool is_delim(char c) {
        return c == '(' || c == ')' || c == '#' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
    }
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else {
                return;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Formula parse_file() {
        std::optional<VarSet> declared;
        if (peek().kind == Token::Kind::Open && peek(1).kind == Token::Kind::Symbol &&
            peek(1).text == "declare-vars") {
            next();
            next();
            declared = VarSet{};
            for (const auto& v : parse_var_list()) declared->insert(v);
            expect_close();
        }
        Formula f = parse_formula();
        if (peek().kind != Token::Kind::End) fail("trailing input after formula", peek());
        if (declared) {
            for (const auto& v : free_vars(f)) {
                if (!declared->count(v)) {
                    const Token& t = first_use_.at(v);
                    throw UnboundSymbol(v, t.line, t.column);
                }
            }
        }
        return f;
    }

private:
    const Token& peek(std::size_t k = 0) const {
        return toks_[std::min(pos_ + k, toks_.size() - 1)];
    }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    [[noreturn]] static void fail(const std::string& msg, const Token& t) {
        throw ParseError(msg, t.line, t.column);
    }
    void expect_open() {
        if (peek().kind != Token::Kind::Open) fail("expected '('", peek());
        next();
    }
    void expect_close() {
        if (peek().kind != Token::Kind::Close) fail("expected ')'", peek());
        next();
    }

    std::vector<Var> parse_var_list() {
        expect_open();
        std::vector<Var> vs;
        while (peek().kind == Token::Kind::Symbol) {
            const Token& t = next();
            if (!is_variable_name(t.text)) fail("invalid variable name '" + t.text + "'", t);
            vs.emplace_back(t.text);
        }
        expect_close();
        if (vs.empty()) fail("empty variable list", peek());
        return vs;
    }

    static bool is_variable_name(const std::string& s) {
        return is_identifier(s) && s != "true" && s != "false";
    }

    Formula parse_formula() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Symbol) {
            next();
            if (t.text == "true") return mk_true();
            if (t.text == "false") return mk_false();
            fail("expected formula, got '" + t.text + "'", t);
        }
        if (t.kind != Token::Kind::Open) fail("expected formula", t);
        next();
        const Token& op = next();
        if (op.kind != Token::Kind::Symbol) fail("expected operator", op);
        const std::string& name = op.text;
        Formula result;
        if (name == "and" || name == "or") {
            std::vector<Formula> cs;
            while (peek().kind != Token::Kind::Close && peek().kind != Token::Kind::End)
                cs.push_back(parse_formula());
            if (cs.empty()) fail("'" + name + "' needs at least one argument", op);
            result = name == "and" ? mk_and(std::move(cs)) : mk_or(std::move(cs));
        } else if (name == "not") {
            result = mk_not(parse_formula());
        } else if (name == "=>") {
            Formula a = parse_formula();
            Formula b = parse_formula();
            result = mk_implies(std::move(a), std::move(b));
        } else if (name == "exists" || name == "forall") {
            auto vs = parse_var_list();
            Formula body = parse_formula();
            result = name == "exists" ? mk_exists(std::move(vs), std::move(body))
                                      : mk_forall(std::move(vs), std::move(body));
        } else if (name == ">=" || name == ">" || name == "<=" || name == "<" || name == "=") {
            LinearTerm a = parse_term();
            LinearTerm b = parse_term();
            if (name == ">=") result = mk_atom(a - b, Relation::GE);
            else if (name == ">") result = mk_atom(a - b, Relation::GT);
            else if (name == "<=") result = mk_atom(b - a, Relation::GE);
            else if (name == "<") result = mk_atom(b - a, Relation::GT);
            else result = mk_atom(a - b, Relation::EQ);
        } else {
            fail("unknown operator '" + name + "'", op);
        }
        expect_close();
        return result;
    }

    LinearTerm parse_term() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Symbol) {
            next();
            if (looks_like_rational(t.text)) {
                try {
                    return LinearTerm(parse_rational(t.text));
                } catch (const std::invalid_argument& e) {
                    fail(e.what(), t);
                }
            }
            if (!is_variable_name(t.text)) fail("invalid term '" + t.text + "'", t);
            Var v(t.text);
            first_use_.try_emplace(v, t);
            return LinearTerm::variable(v);
        }
        if (t.kind != Token::Kind::Open) fail("expected term", t);
        next();
        const Token& op = next();
        if (op.kind != Token::Kind::Symbol) fail("expected arithmetic operator", op);
        LinearTerm result;
        if (op.text == "+") {
            if (peek().kind == Token::Kind::Close) fail("'+' needs at least one argument", op);
            while (peek().kind != Token::Kind::Close && peek().kind != Token::Kind::End)
                result += parse_term();
        } else if (op.text == "-") {
            LinearTerm a = parse_term();
            if (peek().kind == Token::Kind::Close) {
                result = -a;
            } else {
                result = a - parse_term();
            }
        } else if (op.text == "*") {
            const Token& k = peek();
            LinearTerm a = parse_term();
            LinearTerm b = parse_term();
            if (!a.is_constant()) {
                if (b.is_constant()) fail("expected (* rational term)", k);
                fail("nonlinear term", op);
            }
            result = b * a.constant();
        } else {
            fail("unknown arithmetic operator '" + op.text + "'", op);
        }
        expect_close();
        return result;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::map<Var, Token> first_use_;
};

inline void print_term(std::ostream& os, const LinearTerm& t) {
    std::vector<std::string> parts;
    for (const auto& [v, c] : t.coeffs()) {
        if (c == 1) parts.push_back(v.name());
        else parts.push_back("(* " + to_string(c) + " " + v.name() + ")");
    }
    if (t.constant() != 0 || parts.empty()) parts.push_back(to_string(t.constant()));
    if (parts.size() == 1) {
        os << parts.front();
        return;
    }
    os << "(+";
    for (const auto& p : parts) os << ' ' << p;
    os << ')';
}

inline void print_formula(std::ostream& os, const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True: os << "true"; return;
    case K::False: os << "false"; return;
    case K::Atom:
        os << '(' << relation_symbol(f.atom().rel()) << ' ';
        print_term(os, f.atom().term());
        os << " 0)";
        return;
    case K::Not:
        os << "(not ";
        print_formula(os, f.body());
        os << ')';
        return;
    case K::And:
    case K::Or:
        os << (f.kind() == K::And ? "(and" : "(or");
        for (const auto& c : f.children()) {
            os << ' ';
            print_formula(os, c);
        }
        os << ')';
        return;
    case K::Exists:
    case K::Forall: {
        os << (f.kind() == K::Exists ? "(exists (" : "(forall (");
        bool first = true;
        for (const auto& v : f.bound()) {
            if (!first) os << ' ';
            os << v.name();
            first = false;
        }
        os << ") ";
        print_formula(os, f.body());
        os << ')';
        return;
    }
    }
}

} // namespace detail

inline Formula parse(std::string_view text) {
    detail::Parser p(detail::Lexer(text).run());
    return p.parse_file();
}

inline Formula parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

inline std::string print(const LinearTerm& t) {
    std::ostringstream os;
    detail::print_term(os, t);
    return os.str();
}

inline std::string print(const Atom& a) {
    std::ostringstream os;
    detail::print_formula(os, mk_atom(a));
    return os.str();
}

inline std::string print(const Formula& f) {
    std::ostringstream os;
    detail::print_formula(os, f);
    return os.str();
}

inline std::string print(const Model& m) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [v, q] : m) {
        if (!first) os << ", ";
        os << v.name() << ": " << to_string(q);
        first = false;
    }
    os << '}';
    return os.str();
}

} // namespace qelim
