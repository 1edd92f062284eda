#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "austere/syntax.hpp"

namespace austere {

class parse_error : public std::runtime_error {
public:
    parse_error(int line, int column, const std::string& msg)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_, column_;
};

namespace detail {

enum class Tok {
    End,
    Ident,      // lowercase or '_' first
    Variable,   // uppercase first
    Number,
    Not,        // `not`
    Dot,
    DotDot,
    Comma,
    Semicolon,
    Colon,
    If,         // :-
    LParen,
    RParen,
    LBrace,
    RBrace,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Arrow,      // ->
    DArrow,     // <->
    Bar,        // |
    Amp,        // &
    HashConst,
    HashMinimize,
    HashShow,
    HashCount,
    HashFalse,
    HashTrue,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    long long number = 0;
    int line = 1, column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { tokenize(); }

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    Token next() {
        const Token& t = peek();
        if (pos_ < tokens_.size() - 1) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == Tok::End; }

private:
    void tokenize() {
        int line = 1, col = 1;
        std::size_t i = 0;
        auto advance = [&](std::size_t n) {
            for (std::size_t k = 0; k < n; ++k, ++i) {
                if (text_[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
        };
        while (i < text_.size()) {
            char c = text_[i];
            if (c == '%') {  // comment to end of line
                while (i < text_.size() && text_[i] != '\n') advance(1);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
                continue;
            }
            Token t;
            t.line = line;
            t.column = col;
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
                t.kind = Tok::Number;
                t.text = std::string(text_.substr(i, j - i));
                t.number = std::stoll(t.text);
                advance(j - i);
                tokens_.push_back(std::move(t));
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
                    ++j;
                t.text = std::string(text_.substr(i, j - i));
                if (t.text == "not") {
                    t.kind = Tok::Not;
                } else {
                    t.kind = std::isupper(static_cast<unsigned char>(c)) ? Tok::Variable : Tok::Ident;
                }
                advance(j - i);
                tokens_.push_back(std::move(t));
                continue;
            }
            if (c == '#') {
                std::size_t j = i + 1;
                while (j < text_.size() && std::isalpha(static_cast<unsigned char>(text_[j]))) ++j;
                std::string word(text_.substr(i, j - i));
                if (word == "#const") t.kind = Tok::HashConst;
                else if (word == "#minimize") t.kind = Tok::HashMinimize;
                else if (word == "#show") t.kind = Tok::HashShow;
                else if (word == "#count") t.kind = Tok::HashCount;
                else if (word == "#false") t.kind = Tok::HashFalse;
                else if (word == "#true") t.kind = Tok::HashTrue;
                else throw parse_error(line, col, "unknown directive '" + word + "'");
                t.text = std::move(word);
                advance(j - i);
                tokens_.push_back(std::move(t));
                continue;
            }
            auto two = [&](char a, char b) {
                return c == a && i + 1 < text_.size() && text_[i + 1] == b;
            };
            if (two(':', '-')) { t.kind = Tok::If; advance(2); }
            else if (two('.', '.')) { t.kind = Tok::DotDot; advance(2); }
            else if (two('!', '=')) { t.kind = Tok::Ne; advance(2); }
            else if (two('<', '=')) { t.kind = Tok::Le; advance(2); }
            else if (two('>', '=')) { t.kind = Tok::Ge; advance(2); }
            else if (two('-', '>')) { t.kind = Tok::Arrow; advance(2); }
            else if (two('<', '-') && i + 2 < text_.size() && text_[i + 2] == '>') {
                t.kind = Tok::DArrow;
                advance(3);
            }
            else {
                switch (c) {
                    case '.': t.kind = Tok::Dot; break;
                    case ',': t.kind = Tok::Comma; break;
                    case ';': t.kind = Tok::Semicolon; break;
                    case ':': t.kind = Tok::Colon; break;
                    case '(': t.kind = Tok::LParen; break;
                    case ')': t.kind = Tok::RParen; break;
                    case '{': t.kind = Tok::LBrace; break;
                    case '}': t.kind = Tok::RBrace; break;
                    case '+': t.kind = Tok::Plus; break;
                    case '-': t.kind = Tok::Minus; break;
                    case '*': t.kind = Tok::Star; break;
                    case '/': t.kind = Tok::Slash; break;
                    case '=': t.kind = Tok::Eq; break;
                    case '<': t.kind = Tok::Lt; break;
                    case '>': t.kind = Tok::Gt; break;
                    case '|': t.kind = Tok::Bar; break;
                    case '&': t.kind = Tok::Amp; break;
                    default:
                        throw parse_error(line, col, std::string("unexpected character '") + c + "'");
                }
                advance(1);
            }
            tokens_.push_back(std::move(t));
        }
        Token end;
        end.kind = Tok::End;
        end.line = line;
        end.column = col;
        tokens_.push_back(std::move(end));
    }

    std::string_view text_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

inline bool is_relop(Tok k) {
    return k == Tok::Eq || k == Tok::Ne || k == Tok::Lt || k == Tok::Le || k == Tok::Gt ||
           k == Tok::Ge;
}

inline RelOp to_relop(Tok k) {
    switch (k) {
        case Tok::Eq: return RelOp::Eq;
        case Tok::Ne: return RelOp::Ne;
        case Tok::Lt: return RelOp::Lt;
        case Tok::Le: return RelOp::Le;
        case Tok::Gt: return RelOp::Gt;
        default: return RelOp::Ge;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Program parser

class ProgramParser {
public:
    explicit ProgramParser(std::string_view text) : lex_(text) {}

    Program parse() {
        while (!lex_.at_end()) statement();
        return std::move(program_);
    }

private:
    using Tok = detail::Tok;
    using Token = detail::Token;

    [[noreturn]] void fail(const Token& t, const std::string& msg) {
        throw parse_error(t.line, t.column, msg);
    }

    Token expect(Tok kind, const char* what) {
        Token t = lex_.next();
        if (t.kind != kind) fail(t, std::string("expected ") + what);
        return t;
    }

    void statement() {
        const Token& t = lex_.peek();
        switch (t.kind) {
            case Tok::HashConst: const_directive(); return;
            case Tok::HashShow: show_directive(); return;
            case Tok::HashMinimize: minimize_directive(); return;
            default: rule_statement(); return;
        }
    }

    void const_directive() {
        lex_.next();
        Token name = expect(Tok::Ident, "constant name after #const");
        expect(Tok::Eq, "'=' in #const");
        long long sign = 1;
        if (lex_.peek().kind == Tok::Minus) {
            lex_.next();
            sign = -1;
        }
        Token num = expect(Tok::Number, "integer value in #const");
        expect(Tok::Dot, "'.' after #const directive");
        program_.consts.emplace_back(name.text, sign * num.number);
    }

    void show_directive() {
        Token t = lex_.next();
        Token name = expect(Tok::Ident, "predicate name after #show");
        expect(Tok::Slash, "'/' in #show");
        Token num = expect(Tok::Number, "arity in #show");
        expect(Tok::Dot, "'.' after #show directive");
        program_.shows.push_back(ShowDirective{name.text, static_cast<int>(num.number), t.line});
    }

    void minimize_directive() {
        Token t = lex_.next();
        expect(Tok::LBrace, "'{' after #minimize");
        MinimizeDirective dir;
        dir.line = t.line;
        if (lex_.peek().kind != Tok::RBrace) {
            dir.elements.push_back(minimize_element());
            while (lex_.peek().kind == Tok::Semicolon) {
                lex_.next();
                dir.elements.push_back(minimize_element());
            }
        }
        expect(Tok::RBrace, "'}' closing #minimize");
        expect(Tok::Dot, "'.' after #minimize directive");
        program_.minimizes.push_back(std::move(dir));
    }

    MinimizeElement minimize_element() {
        MinimizeElement e;
        e.tuple.push_back(term());
        while (lex_.peek().kind == Tok::Comma) {
            lex_.next();
            e.tuple.push_back(term());
        }
        if (lex_.peek().kind == Tok::Colon) {
            lex_.next();
            e.condition = condition_literals();
        }
        return e;
    }

    void rule_statement() {
        Rule r;
        Token first = lex_.peek();
        r.line = first.line;
        bool have_head = first.kind != Tok::If;
        if (have_head) r.head = head();
        if (lex_.peek().kind == Tok::If) {
            lex_.next();
            r.body = body();
        } else if (!have_head) {
            fail(lex_.peek(), "expected rule");
        }
        expect(Tok::Dot, "'.' terminating rule");
        register_rule(r);
        program_.rules.push_back(std::move(r));
    }

    Head head() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Ident) return head_atom();
        if (t.kind == Tok::Number || t.kind == Tok::LBrace || t.kind == Tok::HashCount)
            return choice_head();
        fail(t, "expected rule head");
    }

    Atom head_atom() { return atom(); }

    ChoiceHead choice_head() {
        ChoiceHead h;
        if (lex_.peek().kind == Tok::Number) {
            AggregateBound b;
            b.bound = Term::number(lex_.next().number);
            if (detail::is_relop(lex_.peek().kind)) b.op = detail::to_relop(lex_.next().kind);
            h.left = b;
        }
        if (lex_.peek().kind == Tok::HashCount) lex_.next();
        expect(Tok::LBrace, "'{' opening choice");
        if (lex_.peek().kind != Tok::RBrace) {
            h.elements.push_back(element());
            while (lex_.peek().kind == Tok::Semicolon) {
                lex_.next();
                h.elements.push_back(element());
            }
        }
        expect(Tok::RBrace, "'}' closing choice");
        if (detail::is_relop(lex_.peek().kind) || lex_.peek().kind == Tok::Number) {
            AggregateBound b;
            if (detail::is_relop(lex_.peek().kind)) b.op = detail::to_relop(lex_.next().kind);
            Token num = expect(Tok::Number, "integer bound after choice");
            b.bound = Term::number(num.number);
            h.right = b;
        }
        return h;
    }

    ChoiceElement element() {
        ChoiceElement e;
        e.atom = atom();
        if (lex_.peek().kind == Tok::Colon) {
            lex_.next();
            e.condition = condition_literals();
        }
        return e;
    }

    std::vector<CondLit> condition_literals() {
        std::vector<CondLit> out;
        out.push_back(condition_literal());
        while (lex_.peek().kind == Tok::Comma) {
            lex_.next();
            out.push_back(condition_literal());
        }
        return out;
    }

    bool continues_term() const {
        Tok k = lex_.peek().kind;
        return k == Tok::Plus || k == Tok::Minus || k == Tok::Star || k == Tok::Slash ||
               k == Tok::DotDot;
    }

    CondLit condition_literal() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Not) {
            lex_.next();
            Literal l;
            l.negative = true;
            l.atom = atom();
            return l;
        }
        if (t.kind == Tok::Ident) {
            Atom a = atom();
            if (detail::is_relop(lex_.peek().kind) || continues_term()) {
                Comparison c;
                c.lhs = continue_term(atom_to_term(a));
                if (!detail::is_relop(lex_.peek().kind))
                    fail(lex_.peek(), "expected comparison operator");
                c.op = detail::to_relop(lex_.next().kind);
                c.rhs = term();
                return c;
            }
            return Literal{false, std::move(a)};
        }
        // must be a comparison starting with a term
        Comparison c;
        c.lhs = term();
        if (!detail::is_relop(lex_.peek().kind)) fail(lex_.peek(), "expected comparison operator");
        c.op = detail::to_relop(lex_.next().kind);
        c.rhs = term();
        return c;
    }

    std::vector<BodyPart> body() {
        std::vector<BodyPart> out;
        out.push_back(body_part());
        while (lex_.peek().kind == Tok::Comma) {
            lex_.next();
            out.push_back(body_part());
        }
        return out;
    }

    BodyPart body_part() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Not) {
            lex_.next();
            const Token& after = lex_.peek();
            if (after.kind == Tok::Ident && !starts_aggregate()) {
                Literal l;
                l.negative = true;
                l.atom = atom();
                return l;
            }
            Aggregate agg = aggregate();
            agg.negated = true;
            return agg;
        }
        if (starts_aggregate()) return aggregate();
        if (t.kind == Tok::Ident) {
            Atom a = atom();
            if (detail::is_relop(lex_.peek().kind) || continues_term()) {
                Comparison c;
                c.lhs = continue_term(atom_to_term(a));
                if (!detail::is_relop(lex_.peek().kind))
                    fail(lex_.peek(), "expected comparison operator");
                c.op = detail::to_relop(lex_.next().kind);
                c.rhs = term();
                return c;
            }
            return Literal{false, std::move(a)};
        }
        Comparison c;
        c.lhs = term();
        if (!detail::is_relop(lex_.peek().kind)) fail(lex_.peek(), "expected comparison operator");
        c.op = detail::to_relop(lex_.next().kind);
        c.rhs = term();
        return c;
    }

    /// Lookahead: does an aggregate literal start here?
    /// Forms: `{`, `#count`, `NUM {`, `NUM #count`, `NUM REL {`, `NUM REL #count`.
    bool starts_aggregate() const {
        const Token& t = lex_.peek();
        if (t.kind == Tok::LBrace || t.kind == Tok::HashCount) return true;
        if (t.kind != Tok::Number) return false;
        const Token& a = lex_.peek(1);
        if (a.kind == Tok::LBrace || a.kind == Tok::HashCount) return true;
        if (!detail::is_relop(a.kind)) return false;
        const Token& b = lex_.peek(2);
        return b.kind == Tok::LBrace || b.kind == Tok::HashCount;
    }

    Aggregate aggregate() {
        Aggregate agg;
        if (lex_.peek().kind == Tok::Number) {
            AggregateBound b;
            b.bound = Term::number(lex_.next().number);
            if (detail::is_relop(lex_.peek().kind)) b.op = detail::to_relop(lex_.next().kind);
            agg.left = b;
        }
        if (lex_.peek().kind == Tok::HashCount) lex_.next();
        expect(Tok::LBrace, "'{' opening aggregate");
        if (lex_.peek().kind != Tok::RBrace) {
            agg.elements.push_back(element());
            while (lex_.peek().kind == Tok::Semicolon) {
                lex_.next();
                agg.elements.push_back(element());
            }
        }
        expect(Tok::RBrace, "'}' closing aggregate");
        if (detail::is_relop(lex_.peek().kind) || lex_.peek().kind == Tok::Number) {
            AggregateBound b;
            if (detail::is_relop(lex_.peek().kind)) b.op = detail::to_relop(lex_.next().kind);
            Token num = expect(Tok::Number, "integer bound after aggregate");
            b.bound = Term::number(num.number);
            agg.right = b;
        }
        return agg;
    }

    Atom atom() {
        Token name = expect(Tok::Ident, "atom");
        Atom a;
        a.predicate = name.text;
        if (lex_.peek().kind == Tok::LParen) {
            lex_.next();
            a.args.push_back(term());
            while (lex_.peek().kind == Tok::Comma) {
                lex_.next();
                a.args.push_back(term());
            }
            expect(Tok::RParen, "')' closing argument list");
        }
        return a;
    }

    static Term atom_to_term(const Atom& a) {
        if (a.args.empty()) return Term::symbol(a.predicate);
        return Term::function(a.predicate, a.args);
    }

    /// Continues parsing a term whose leftmost primary was already consumed.
    Term continue_term(Term first) {
        Term t = std::move(first);
        while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
            ArithOp op = lex_.next().kind == Tok::Star ? ArithOp::Mul : ArithOp::Div;
            t = Term::arith(op, std::move(t), primary());
        }
        while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
            ArithOp op = lex_.next().kind == Tok::Plus ? ArithOp::Add : ArithOp::Sub;
            t = Term::arith(op, std::move(t), product());
        }
        if (lex_.peek().kind == Tok::DotDot) {
            lex_.next();
            return Term::interval(std::move(t), sum());
        }
        return t;
    }

    // term := sum ('..' sum)?
    Term term() {
        Term t = sum();
        if (lex_.peek().kind == Tok::DotDot) {
            lex_.next();
            Term hi = sum();
            return Term::interval(std::move(t), std::move(hi));
        }
        return t;
    }

    Term sum() {
        Term t = product();
        while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
            ArithOp op = lex_.next().kind == Tok::Plus ? ArithOp::Add : ArithOp::Sub;
            t = Term::arith(op, std::move(t), product());
        }
        return t;
    }

    Term product() {
        Term t = primary();
        while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
            ArithOp op = lex_.next().kind == Tok::Star ? ArithOp::Mul : ArithOp::Div;
            t = Term::arith(op, std::move(t), primary());
        }
        return t;
    }

    Term primary() {
        Token t = lex_.next();
        switch (t.kind) {
            case Tok::Number: return Term::number(t.number);
            case Tok::Minus: {
                Token num = expect(Tok::Number, "number after unary '-'");
                return Term::number(-num.number);
            }
            case Tok::Variable: return Term::variable(t.text);
            case Tok::Ident: {
                if (lex_.peek().kind == Tok::LParen) {
                    lex_.next();
                    std::vector<Term> args;
                    args.push_back(term());
                    while (lex_.peek().kind == Tok::Comma) {
                        lex_.next();
                        args.push_back(term());
                    }
                    expect(Tok::RParen, "')' closing term arguments");
                    return Term::function(t.text, std::move(args));
                }
                return Term::symbol(t.text);
            }
            case Tok::LParen: {
                Term inner = term();
                expect(Tok::RParen, "')'");
                return inner;
            }
            default: fail(t, "expected term");
        }
    }

    void register_rule(const Rule& r) {
        try {
            if (const Atom* a = r.head_atom()) {
                program_.signature.declare(a->predicate, a->arity(), r.line);
            } else if (const auto* c = std::get_if<ChoiceHead>(&r.head)) {
                for (const auto& e : c->elements) {
                    program_.signature.declare(e.atom.predicate, e.atom.arity(), r.line);
                    for (const auto& cl : e.condition) register_cond(cl, r.line);
                }
            }
            for (const auto& part : r.body) {
                if (const auto* lit = std::get_if<Literal>(&part)) {
                    program_.signature.declare(lit->atom.predicate, lit->atom.arity(), r.line);
                } else if (const auto* agg = std::get_if<Aggregate>(&part)) {
                    for (const auto& e : agg->elements) {
                        program_.signature.declare(e.atom.predicate, e.atom.arity(), r.line);
                        for (const auto& cl : e.condition) register_cond(cl, r.line);
                    }
                }
            }
        } catch (const std::runtime_error& e) {
            if (dynamic_cast<const parse_error*>(&e)) throw;
            throw parse_error(r.line, 1, e.what());
        }
    }

    void register_cond(const CondLit& c, int line) {
        if (const auto* lit = std::get_if<Literal>(&c))
            program_.signature.declare(lit->atom.predicate, lit->atom.arity(), line);
    }

    detail::Lexer lex_;
    Program program_;
};

// ---------------------------------------------------------------------------
// Post-parse pipeline: #const substitution and fact interval expansion

namespace detail {

inline Term substitute_consts(const Term& t, const std::map<std::string, long long>& consts) {
    switch (t.kind()) {
        case Term::Kind::Symbol: {
            auto it = consts.find(t.name());
            return it != consts.end() ? Term::number(it->second) : t;
        }
        case Term::Kind::Number:
        case Term::Kind::Variable: return t;
        default: {
            std::vector<Term> args;
            args.reserve(t.args().size());
            for (const auto& a : t.args()) args.push_back(substitute_consts(a, consts));
            if (t.kind() == Term::Kind::Function) return Term::function(t.name(), std::move(args));
            if (t.kind() == Term::Kind::Arith)
                return Term::arith(t.op(), args[0], args[1]);
            return Term::interval(args[0], args[1]);
        }
    }
}

inline void substitute_consts(Atom& a, const std::map<std::string, long long>& consts) {
    for (auto& t : a.args) t = substitute_consts(t, consts);
}

inline void substitute_consts(std::vector<CondLit>& conds,
                              const std::map<std::string, long long>& consts) {
    for (auto& c : conds) {
        if (auto* lit = std::get_if<Literal>(&c)) {
            substitute_consts(lit->atom, consts);
        } else {
            auto& cmp = std::get<Comparison>(c);
            cmp.lhs = substitute_consts(cmp.lhs, consts);
            cmp.rhs = substitute_consts(cmp.rhs, consts);
        }
    }
}

inline void substitute_consts(Program& p, const std::map<std::string, long long>& consts) {
    auto fix_bound = [&](std::optional<AggregateBound>& b) {
        if (b) b->bound = substitute_consts(b->bound, consts);
    };
    for (auto& r : p.rules) {
        if (Atom* a = std::get_if<Atom>(&r.head)) {
            substitute_consts(*a, consts);
        } else if (auto* c = std::get_if<ChoiceHead>(&r.head)) {
            fix_bound(c->left);
            fix_bound(c->right);
            for (auto& e : c->elements) {
                substitute_consts(e.atom, consts);
                substitute_consts(e.condition, consts);
            }
        }
        for (auto& part : r.body) {
            if (auto* lit = std::get_if<Literal>(&part)) {
                substitute_consts(lit->atom, consts);
            } else if (auto* cmp = std::get_if<Comparison>(&part)) {
                cmp->lhs = substitute_consts(cmp->lhs, consts);
                cmp->rhs = substitute_consts(cmp->rhs, consts);
            } else {
                auto& agg = std::get<Aggregate>(part);
                fix_bound(agg.left);
                fix_bound(agg.right);
                for (auto& e : agg.elements) {
                    substitute_consts(e.atom, consts);
                    substitute_consts(e.condition, consts);
                }
            }
        }
    }
    for (auto& m : p.minimizes) {
        for (auto& e : m.elements) {
            for (auto& t : e.tuple) t = substitute_consts(t, consts);
            substitute_consts(e.condition, consts);
        }
    }
}

/// Evaluates a ground arithmetic term to an integer.
inline long long eval_ground_int(const Term& t, int line) {
    switch (t.kind()) {
        case Term::Kind::Number: return t.number();
        case Term::Kind::Arith: {
            long long l = eval_ground_int(t.args()[0], line);
            long long r = eval_ground_int(t.args()[1], line);
            switch (t.op()) {
                case ArithOp::Add: return l + r;
                case ArithOp::Sub: return l - r;
                case ArithOp::Mul: return l * r;
                case ArithOp::Div:
                    if (r == 0) throw parse_error(line, 1, "division by zero");
                    return l / r;
            }
            return 0;
        }
        default:
            throw parse_error(line, 1, "arithmetic on non-integer term");
    }
}

template <typename F>
void expand_cartesian(const std::vector<std::vector<Term>>& choices, std::size_t i,
                      std::vector<Term>& current, F&& emit) {
    if (i == choices.size()) {
        emit(current);
        return;
    }
    for (const auto& t : choices[i]) {
        current[i] = t;
        expand_cartesian(choices, i + 1, current, emit);
    }
}

/// Expands intervals (and evaluates arithmetic) inside a fact argument.
inline std::vector<Term> expand_fact_term(const Term& t, int line,
                                          std::vector<Diagnostic>& warnings) {
    switch (t.kind()) {
        case Term::Kind::Interval: {
            long long lo = eval_ground_int(t.args()[0], line);
            long long hi = eval_ground_int(t.args()[1], line);
            std::vector<Term> out;
            if (lo > hi) {
                warnings.push_back({Diagnostic::Severity::Warning, line,
                                    "empty interval " + std::to_string(lo) + ".." +
                                        std::to_string(hi)});
                return out;
            }
            for (long long v = lo; v <= hi; ++v) out.push_back(Term::number(v));
            return out;
        }
        case Term::Kind::Arith: return {Term::number(eval_ground_int(t, line))};
        case Term::Kind::Function: {
            std::vector<std::vector<Term>> choices;
            for (const auto& a : t.args()) choices.push_back(expand_fact_term(a, line, warnings));
            std::vector<Term> out;
            std::vector<Term> current(t.args().size());
            expand_cartesian(choices, 0, current, [&](const std::vector<Term>& args) {
                out.push_back(Term::function(t.name(), args));
            });
            return out;
        }
        default: return {t};
    }
}

inline void expand_fact_intervals(Program& p) {
    std::vector<Rule> out;
    out.reserve(p.rules.size());
    for (auto& r : p.rules) {
        const Atom* head = r.head_atom();
        bool is_fact = head && r.body.empty();
        bool has_interval = false;
        if (is_fact)
            for (const auto& t : head->args)
                if (t.has_interval() || t.kind() == Term::Kind::Arith) has_interval = true;
        if (!is_fact || !has_interval || !head->is_ground()) {
            out.push_back(std::move(r));
            continue;
        }
        std::vector<std::vector<Term>> choices;
        for (const auto& t : head->args)
            choices.push_back(expand_fact_term(t, r.line, p.warnings));
        std::vector<Term> current(head->args.size());
        expand_cartesian(choices, 0, current, [&](const std::vector<Term>& args) {
            Rule f;
            f.head = Atom{head->predicate, args};
            f.line = r.line;
            out.push_back(std::move(f));
        });
    }
    p.rules = std::move(out);
}

}  // namespace detail

/// Parses a logic program. `const_overrides` take precedence over #const
/// directives in the text; interval facts are expanded eagerly.
inline Program parse_program(std::string_view text,
                             const std::map<std::string, long long>& const_overrides = {}) {
    Program p = ProgramParser(text).parse();
    std::map<std::string, long long> consts;
    for (const auto& [name, value] : p.consts) consts[name] = value;
    for (const auto& [name, value] : const_overrides) consts[name] = value;
    p.consts.assign(consts.begin(), consts.end());
    if (!consts.empty()) detail::substitute_consts(p, consts);
    detail::expand_fact_intervals(p);
    return p;
}

// ---------------------------------------------------------------------------
// Formula parser

class FormulaParser {
public:
    explicit FormulaParser(std::string_view text) : lex_(text) {}

    Formula parse() {
        Formula f = iff();
        if (!lex_.at_end())
            throw parse_error(lex_.peek().line, lex_.peek().column, "trailing input after formula");
        return f;
    }

private:
    using Tok = detail::Tok;

    Formula iff() {
        Formula f = impl();
        while (lex_.peek().kind == Tok::DArrow) {
            lex_.next();
            f = Formula::iff(f, impl());
        }
        return f;
    }

    Formula impl() {
        Formula f = disjunction();
        if (lex_.peek().kind == Tok::Arrow) {
            lex_.next();
            return Formula::implies(f, impl());  // right-assoc
        }
        return f;
    }

    Formula disjunction() {
        Formula f = conjunction();
        while (lex_.peek().kind == Tok::Bar) {
            lex_.next();
            f = Formula::disj(f, conjunction());
        }
        return f;
    }

    Formula conjunction() {
        Formula f = unary();
        while (lex_.peek().kind == Tok::Amp) {
            lex_.next();
            f = Formula::conj(f, unary());
        }
        return f;
    }

    Formula unary() {
        const detail::Token& t = lex_.peek();
        if (t.kind == Tok::Not || t.kind == Tok::Minus) {
            lex_.next();
            return Formula::neg(unary());
        }
        return primary();
    }

    Formula primary() {
        detail::Token t = lex_.next();
        switch (t.kind) {
            case Tok::Ident: return Formula::atom(t.text);
            case Tok::HashFalse: return Formula::bottom();
            case Tok::HashTrue: return Formula::top();
            case Tok::LParen: {
                Formula f = iff();
                detail::Token close = lex_.next();
                if (close.kind != Tok::RParen)
                    throw parse_error(close.line, close.column, "expected ')'");
                return f;
            }
            default: throw parse_error(t.line, t.column, "expected formula");
        }
    }

    detail::Lexer lex_;
};

inline Formula parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

}  // namespace austere
