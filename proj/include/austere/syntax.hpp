#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "austere/formula.hpp"

namespace austere {

// ---------------------------------------------------------------------------
// Terms

enum class ArithOp { Add, Sub, Mul, Div };
enum class RelOp { Eq, Ne, Lt, Le, Gt, Ge };

inline const char* to_string(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
        case ArithOp::Div: return "/";
    }
    return "?";
}

inline const char* to_string(RelOp op) {
    switch (op) {
        case RelOp::Eq: return "=";
        case RelOp::Ne: return "!=";
        case RelOp::Lt: return "<";
        case RelOp::Le: return "<=";
        case RelOp::Gt: return ">";
        case RelOp::Ge: return ">=";
    }
    return "?";
}

/// First-order term: integer, symbolic constant, variable, one-level
/// function term, arithmetic expression, or interval l..u.
class Term {
public:
    enum class Kind { Number, Symbol, Variable, Function, Arith, Interval };

    Term() : kind_(Kind::Number), number_(0) {}

    static Term number(long long v) {
        Term t;
        t.kind_ = Kind::Number;
        t.number_ = v;
        return t;
    }
    static Term symbol(std::string name) {
        Term t;
        t.kind_ = Kind::Symbol;
        t.name_ = std::move(name);
        return t;
    }
    static Term variable(std::string name) {
        Term t;
        t.kind_ = Kind::Variable;
        t.name_ = std::move(name);
        return t;
    }
    static Term function(std::string name, std::vector<Term> args) {
        Term t;
        t.kind_ = Kind::Function;
        t.name_ = std::move(name);
        t.args_ = std::move(args);
        return t;
    }
    static Term arith(ArithOp op, Term lhs, Term rhs) {
        Term t;
        t.kind_ = Kind::Arith;
        t.op_ = op;
        t.args_ = {std::move(lhs), std::move(rhs)};
        return t;
    }
    static Term interval(Term lo, Term hi) {
        Term t;
        t.kind_ = Kind::Interval;
        t.args_ = {std::move(lo), std::move(hi)};
        return t;
    }

    Kind kind() const { return kind_; }
    long long number() const { return number_; }
    const std::string& name() const { return name_; }
    ArithOp op() const { return op_; }
    const std::vector<Term>& args() const { return args_; }

    bool is_ground() const {
        if (kind_ == Kind::Variable) return false;
        for (const auto& a : args_)
            if (!a.is_ground()) return false;
        return true;
    }

    bool has_interval() const {
        if (kind_ == Kind::Interval) return true;
        for (const auto& a : args_)
            if (a.has_interval()) return true;
        return false;
    }

    friend bool operator==(const Term& a, const Term& b) {
        if (a.kind_ != b.kind_) return false;
        switch (a.kind_) {
            case Kind::Number: return a.number_ == b.number_;
            case Kind::Symbol:
            case Kind::Variable: return a.name_ == b.name_;
            case Kind::Arith:
                if (a.op_ != b.op_) return false;
                [[fallthrough]];
            case Kind::Function:
                if (a.name_ != b.name_) return false;
                [[fallthrough]];
            case Kind::Interval: return a.args_ == b.args_;
        }
        return false;
    }
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

    // Order on ground terms: numbers first (numerically), then symbols and
    // function terms lexicographically.
    friend bool operator<(const Term& a, const Term& b) {
        if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
        switch (a.kind_) {
            case Kind::Number: return a.number_ < b.number_;
            case Kind::Symbol:
            case Kind::Variable: return a.name_ < b.name_;
            default:
                if (a.name_ != b.name_) return a.name_ < b.name_;
                return a.args_ < b.args_;
        }
    }

private:
    Kind kind_;
    long long number_ = 0;
    std::string name_;
    ArithOp op_ = ArithOp::Add;
    std::vector<Term> args_;
};

// ---------------------------------------------------------------------------
// Atoms, literals, bodies

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    int arity() const { return static_cast<int>(args.size()); }
    bool is_ground() const {
        for (const auto& t : args)
            if (!t.is_ground()) return false;
        return true;
    }
    friend bool operator==(const Atom& a, const Atom& b) {
        return a.predicate == b.predicate && a.args == b.args;
    }
    friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
    friend bool operator<(const Atom& a, const Atom& b) {
        if (a.predicate != b.predicate) return a.predicate < b.predicate;
        return a.args < b.args;
    }
};

struct Literal {
    bool negative = false;
    Atom atom;

    friend bool operator==(const Literal& a, const Literal& b) {
        return a.negative == b.negative && a.atom == b.atom;
    }
};

struct Comparison {
    Term lhs;
    RelOp op = RelOp::Eq;
    Term rhs;

    friend bool operator==(const Comparison& a, const Comparison& b) {
        return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
    }
};

/// Condition literal of a choice/aggregate element or a minimize element.
using CondLit = std::variant<Literal, Comparison>;

struct ChoiceElement {
    Atom atom;
    std::vector<CondLit> condition;

    friend bool operator==(const ChoiceElement& a, const ChoiceElement& b) {
        return a.atom == b.atom && a.condition == b.condition;
    }
};

/// One-sided aggregate guard: `bound REL count` on the left,
/// `count REL bound` on the right. A missing relation means <=.
struct AggregateBound {
    RelOp op = RelOp::Le;
    Term bound;

    friend bool operator==(const AggregateBound& a, const AggregateBound& b) {
        return a.op == b.op && a.bound == b.bound;
    }
};

/// Body aggregate `#count{ e1; ...; em } REL k`, optionally negated and
/// optionally bounded on both sides.
struct Aggregate {
    bool negated = false;
    std::optional<AggregateBound> left;
    std::optional<AggregateBound> right;
    std::vector<ChoiceElement> elements;

    friend bool operator==(const Aggregate& a, const Aggregate& b) {
        return a.negated == b.negated && a.left == b.left && a.right == b.right &&
               a.elements == b.elements;
    }
};

using BodyPart = std::variant<Literal, Comparison, Aggregate>;

// ---------------------------------------------------------------------------
// Rules

/// Choice head `{ e1; ...; em }`; bounds turn it into a #count aggregate
/// head that eliminate_aggregate_head() rewrites away.
struct ChoiceHead {
    std::optional<AggregateBound> left;
    std::optional<AggregateBound> right;
    std::vector<ChoiceElement> elements;

    bool bounded() const { return left.has_value() || right.has_value(); }

    friend bool operator==(const ChoiceHead& a, const ChoiceHead& b) {
        return a.left == b.left && a.right == b.right && a.elements == b.elements;
    }
};

struct ConstraintHead {
    friend bool operator==(ConstraintHead, ConstraintHead) { return true; }
};

using Head = std::variant<Atom, ChoiceHead, ConstraintHead>;

enum class RuleKind { Fact, Definite, Normal, Constraint, Choice };

inline const char* to_string(RuleKind k) {
    switch (k) {
        case RuleKind::Fact: return "fact";
        case RuleKind::Definite: return "definite";
        case RuleKind::Normal: return "normal";
        case RuleKind::Constraint: return "constraint";
        case RuleKind::Choice: return "choice";
    }
    return "?";
}

struct Rule {
    Head head = ConstraintHead{};
    std::vector<BodyPart> body;
    int line = 0;

    bool is_constraint() const { return std::holds_alternative<ConstraintHead>(head); }
    bool is_choice() const { return std::holds_alternative<ChoiceHead>(head); }
    const Atom* head_atom() const { return std::get_if<Atom>(&head); }

    /// True if no body part is a negative literal or a negated aggregate.
    bool body_negation_free() const {
        for (const auto& part : body) {
            if (const auto* lit = std::get_if<Literal>(&part)) {
                if (lit->negative) return false;
            } else if (const auto* agg = std::get_if<Aggregate>(&part)) {
                if (agg->negated) return false;
            }
        }
        return true;
    }

    bool body_has_aggregate() const {
        for (const auto& part : body)
            if (std::holds_alternative<Aggregate>(part)) return true;
        return false;
    }

    /// Structural classification per the rule taxonomy: facts and definite
    /// rules are negation-free, a normal rule has a single-atom head, a
    /// constraint has an empty head.
    RuleKind kind() const {
        if (is_constraint()) return RuleKind::Constraint;
        if (is_choice()) return RuleKind::Choice;
        if (body.empty()) return RuleKind::Fact;
        return body_negation_free() && !body_has_aggregate() ? RuleKind::Definite
                                                             : RuleKind::Normal;
    }

    friend bool operator==(const Rule& a, const Rule& b) {
        return a.head == b.head && a.body == b.body;
    }
};

// ---------------------------------------------------------------------------
// Directives and programs

struct MinimizeElement {
    std::vector<Term> tuple;  // weight = first term when integer, else 1
    std::vector<CondLit> condition;
};

struct MinimizeDirective {
    std::vector<MinimizeElement> elements;
    int line = 0;
};

struct ShowDirective {
    std::string predicate;
    int arity = 0;
    int line = 0;
};

/// Predicate signature: name -> arity, with the line of first use for
/// diagnostics. Arities must be consistent program-wide.
struct Signature {
    struct Entry {
        int arity = 0;
        int line = 0;
    };
    std::map<std::string, Entry> predicates;

    void declare(const std::string& name, int arity, int line) {
        auto [it, inserted] = predicates.try_emplace(name, Entry{arity, line});
        if (!inserted && it->second.arity != arity) {
            throw std::runtime_error("arity clash for predicate '" + name + "': used with arity " +
                                     std::to_string(it->second.arity) + " (line " +
                                     std::to_string(it->second.line) + ") and arity " +
                                     std::to_string(arity) + " (line " + std::to_string(line) + ")");
        }
    }
    bool contains(const std::string& name) const { return predicates.count(name) != 0; }
};

struct Diagnostic {
    enum class Severity { Error, Warning, Note };
    Severity severity = Severity::Warning;
    int line = 0;
    std::string message;
};

struct Program {
    std::vector<Rule> rules;
    std::vector<MinimizeDirective> minimizes;
    std::vector<ShowDirective> shows;
    std::vector<std::pair<std::string, long long>> consts;
    Signature signature;
    std::vector<Diagnostic> warnings;

    bool is_ground() const {
        for (const auto& r : rules) {
            if (const Atom* a = r.head_atom()) {
                if (!a->is_ground()) return false;
            } else if (const auto* c = std::get_if<ChoiceHead>(&r.head)) {
                for (const auto& e : c->elements) {
                    if (!e.atom.is_ground() || !e.condition.empty()) return false;
                }
            }
            for (const auto& part : r.body) {
                if (const auto* lit = std::get_if<Literal>(&part)) {
                    if (!lit->atom.is_ground()) return false;
                } else if (std::holds_alternative<Comparison>(part)) {
                    return false;  // comparisons are resolved by grounding
                } else if (const auto* agg = std::get_if<Aggregate>(&part)) {
                    for (const auto& e : agg->elements)
                        if (!e.atom.is_ground() || !e.condition.empty()) return false;
                }
            }
        }
        return true;
    }
};

// Convenience constructors used throughout tests and transforms.

inline Atom atom(std::string pred, std::vector<Term> args = {}) {
    return Atom{std::move(pred), std::move(args)};
}

inline Literal pos(Atom a) { return Literal{false, std::move(a)}; }
inline Literal neg(Atom a) { return Literal{true, std::move(a)}; }

inline Rule fact(Atom head, int line = 0) {
    Rule r;
    r.head = std::move(head);
    r.line = line;
    return r;
}

inline Rule rule(Atom head, std::vector<BodyPart> body, int line = 0) {
    Rule r;
    r.head = std::move(head);
    r.body = std::move(body);
    r.line = line;
    return r;
}

inline Rule constraint(std::vector<BodyPart> body, int line = 0) {
    Rule r;
    r.head = ConstraintHead{};
    r.body = std::move(body);
    r.line = line;
    return r;
}

inline Rule choice(std::vector<Atom> atoms, std::vector<BodyPart> body = {}, int line = 0) {
    ChoiceHead h;
    for (auto& a : atoms) h.elements.push_back(ChoiceElement{std::move(a), {}});
    Rule r;
    r.head = std::move(h);
    r.body = std::move(body);
    r.line = line;
    return r;
}

}  // namespace austere
