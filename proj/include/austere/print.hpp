#pragma once

#include <sstream>
#include <string>

#include "austere/syntax.hpp"

namespace austere {

// Canonical text forms. The parser accepts exactly what these emit, so
// parse(print(x)) reproduces the AST.

inline int arith_precedence(ArithOp op) {
    return (op == ArithOp::Mul || op == ArithOp::Div) ? 2 : 1;
}

inline void print_term(std::ostream& os, const Term& t, int parent_prec = 0) {
    switch (t.kind()) {
        case Term::Kind::Number: os << t.number(); break;
        case Term::Kind::Symbol:
        case Term::Kind::Variable: os << t.name(); break;
        case Term::Kind::Function: {
            os << t.name() << '(';
            bool first = true;
            for (const auto& a : t.args()) {
                if (!first) os << ',';
                first = false;
                print_term(os, a);
            }
            os << ')';
            break;
        }
        case Term::Kind::Arith: {
            int prec = arith_precedence(t.op());
            bool parens = prec < parent_prec;
            if (parens) os << '(';
            print_term(os, t.args()[0], prec);
            os << to_string(t.op());
            print_term(os, t.args()[1], prec + 1);  // left-assoc
            if (parens) os << ')';
            break;
        }
        case Term::Kind::Interval:
            print_term(os, t.args()[0], 3);
            os << "..";
            print_term(os, t.args()[1], 3);
            break;
    }
}

inline void print_atom(std::ostream& os, const Atom& a) {
    os << a.predicate;
    if (!a.args.empty()) {
        os << '(';
        bool first = true;
        for (const auto& t : a.args) {
            if (!first) os << ',';
            first = false;
            print_term(os, t);
        }
        os << ')';
    }
}

inline void print_literal(std::ostream& os, const Literal& l) {
    if (l.negative) os << "not ";
    print_atom(os, l.atom);
}

inline void print_comparison(std::ostream& os, const Comparison& c) {
    print_term(os, c.lhs);
    os << ' ' << to_string(c.op) << ' ';
    print_term(os, c.rhs);
}

inline void print_cond_lit(std::ostream& os, const CondLit& c) {
    if (const auto* lit = std::get_if<Literal>(&c)) {
        print_literal(os, *lit);
    } else {
        print_comparison(os, std::get<Comparison>(c));
    }
}

inline void print_element(std::ostream& os, const ChoiceElement& e) {
    print_atom(os, e.atom);
    if (!e.condition.empty()) {
        os << " : ";
        bool first = true;
        for (const auto& c : e.condition) {
            if (!first) os << ", ";
            first = false;
            print_cond_lit(os, c);
        }
    }
}

inline void print_elements(std::ostream& os, const std::vector<ChoiceElement>& elems) {
    os << "{ ";
    bool first = true;
    for (const auto& e : elems) {
        if (!first) os << "; ";
        first = false;
        print_element(os, e);
    }
    os << " }";
}

inline void print_bounds_left(std::ostream& os, const std::optional<AggregateBound>& b) {
    if (!b) return;
    print_term(os, b->bound);
    if (b->op != RelOp::Le) os << ' ' << to_string(b->op);
    os << ' ';
}

inline void print_bounds_right(std::ostream& os, const std::optional<AggregateBound>& b) {
    if (!b) return;
    os << ' ';
    if (b->op != RelOp::Le) os << to_string(b->op) << ' ';
    print_term(os, b->bound);
}

inline void print_aggregate(std::ostream& os, const Aggregate& agg) {
    if (agg.negated) os << "not ";
    print_bounds_left(os, agg.left);
    os << "#count ";
    print_elements(os, agg.elements);
    print_bounds_right(os, agg.right);
}

inline void print_choice_head(std::ostream& os, const ChoiceHead& h) {
    print_bounds_left(os, h.left);
    print_elements(os, h.elements);
    print_bounds_right(os, h.right);
}

inline void print_body(std::ostream& os, const std::vector<BodyPart>& body) {
    bool first = true;
    for (const auto& part : body) {
        if (!first) os << ", ";
        first = false;
        if (const auto* lit = std::get_if<Literal>(&part)) {
            print_literal(os, *lit);
        } else if (const auto* cmp = std::get_if<Comparison>(&part)) {
            print_comparison(os, *cmp);
        } else {
            print_aggregate(os, std::get<Aggregate>(part));
        }
    }
}

inline void print_rule(std::ostream& os, const Rule& r) {
    if (const Atom* a = r.head_atom()) {
        print_atom(os, *a);
    } else if (const auto* c = std::get_if<ChoiceHead>(&r.head)) {
        print_choice_head(os, *c);
    }
    if (!r.body.empty() || r.is_constraint()) {
        if (!r.is_constraint()) os << ' ';
        os << ":- ";
        print_body(os, r.body);
    }
    os << '.';
}

inline void print_minimize(std::ostream& os, const MinimizeDirective& m) {
    os << "#minimize { ";
    bool first = true;
    for (const auto& e : m.elements) {
        if (!first) os << "; ";
        first = false;
        bool ft = true;
        for (const auto& t : e.tuple) {
            if (!ft) os << ',';
            ft = false;
            print_term(os, t);
        }
        if (!e.condition.empty()) {
            os << " : ";
            bool fc = true;
            for (const auto& c : e.condition) {
                if (!fc) os << ", ";
                fc = false;
                print_cond_lit(os, c);
            }
        }
    }
    os << " }.";
}

inline void print_program(std::ostream& os, const Program& p) {
    for (const auto& [name, value] : p.consts)
        os << "#const " << name << " = " << value << ".\n";
    for (const auto& r : p.rules) {
        print_rule(os, r);
        os << '\n';
    }
    for (const auto& m : p.minimizes) {
        print_minimize(os, m);
        os << '\n';
    }
    for (const auto& s : p.shows)
        os << "#show " << s.predicate << "/" << s.arity << ".\n";
}

template <typename T>
std::string to_text(const T& x) {
    std::ostringstream os;
    if constexpr (std::is_same_v<T, Term>) print_term(os, x);
    else if constexpr (std::is_same_v<T, Atom>) print_atom(os, x);
    else if constexpr (std::is_same_v<T, Literal>) print_literal(os, x);
    else if constexpr (std::is_same_v<T, Comparison>) print_comparison(os, x);
    else if constexpr (std::is_same_v<T, Aggregate>) print_aggregate(os, x);
    else if constexpr (std::is_same_v<T, Rule>) print_rule(os, x);
    else if constexpr (std::is_same_v<T, MinimizeDirective>) print_minimize(os, x);
    else if constexpr (std::is_same_v<T, Program>) print_program(os, x);
    else static_assert(!sizeof(T*), "no printer for this type");
    return os.str();
}

}  // namespace austere
