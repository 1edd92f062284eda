#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "austere/formula.hpp"
#include "austere/ht.hpp"
#include "austere/print.hpp"
#include "austere/syntax.hpp"

namespace austere {

// ---------------------------------------------------------------------------
// negocc: maximal negated subformulas

namespace detail {
inline void collect_negocc(const Formula& f, std::vector<Formula>& out) {
    if (f.is_negation()) {
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
        return;  // nested negations are not maximal
    }
    switch (f.kind()) {
        case Formula::Kind::Atom:
        case Formula::Kind::Bottom: return;
        default:
            collect_negocc(f.lhs(), out);
            collect_negocc(f.rhs(), out);
    }
}
}  // namespace detail

/// Maximal negated subformulas of ψ, in order of first occurrence.
inline std::vector<Formula> negocc(const Formula& psi) {
    std::vector<Formula> out;
    detail::collect_negocc(psi, out);
    return out;
}

/// For a rule, negocc consists of its negative body literals only.
inline std::vector<Formula> negocc(const Rule& r) {
    std::vector<Formula> out;
    for (const auto& part : r.body) {
        if (const auto* lit = std::get_if<Literal>(&part)) {
            if (!lit->negative) continue;
            Formula f = Formula::neg(Formula::atom(to_text(lit->atom)));
            if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
        }
    }
    return out;
}

inline std::vector<Formula> negocc(const Program& p) {
    std::vector<Formula> out;
    for (const auto& r : p.rules)
        for (const auto& f : negocc(r))
            if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    return out;
}

// ---------------------------------------------------------------------------
// Extension by definition (formula level)

struct FormulaTranslation {
    std::vector<Formula> theory;                 // conjuncts of the result
    std::map<std::string, Formula> aux;          // aux atom name -> defined formula
    std::set<std::string> original_atoms;        // At
    std::vector<Diagnostic> warnings;

    Formula conjunction() const {
        if (theory.empty()) return Formula::top();
        Formula f = theory.front();
        for (std::size_t i = 1; i < theory.size(); ++i) f = Formula::conj(f, theory[i]);
        return f;
    }

    /// T ⊆ At  ->  T ∪ { x_φ | T ⊨ φ } (classical evaluation of each base).
    std::set<std::string> extend(const std::set<std::string>& t) const {
        std::set<std::string> out = t;
        for (const auto& [name, base] : aux)
            if (classical_satisfies(t, base)) out.insert(name);
        return out;
    }

    /// T  ->  T ∩ At.
    std::set<std::string> restrict(const std::set<std::string>& t) const {
        std::set<std::string> out;
        for (const auto& a : t)
            if (original_atoms.count(a)) out.insert(a);
        return out;
    }
};

namespace detail {
inline void check_no_reserved_atoms(const std::set<std::string>& atoms) {
    for (const auto& a : atoms)
        if (is_aux_name(a))
            throw std::runtime_error("reserved-prefix collision: input already uses atom '" + a +
                                     "'");
}
}  // namespace detail

/// Conservative extension ψ[φ/x_φ] ∧ (φ ↔ x_φ) naming φ by a fresh atom.
inline FormulaTranslation extend_by_definition(const Formula& psi, const Formula& phi) {
    FormulaTranslation out;
    out.original_atoms = psi.atoms();
    for (const auto& a : phi.atoms()) out.original_atoms.insert(a);
    detail::check_no_reserved_atoms(out.original_atoms);

    std::string name = aux_name_for(phi);
    Formula x = Formula::atom(name);
    Formula substituted = psi.substitute(phi, x);
    if (substituted == psi && !(psi == phi)) {
        out.warnings.push_back({Diagnostic::Severity::Warning, 0,
                                "formula '" + phi.to_string() +
                                    "' does not occur in the target; substitution is vacuous"});
    }
    out.theory.push_back(substituted);
    out.theory.push_back(Formula::iff(phi, x));
    out.aux.emplace(std::move(name), phi);
    return out;
}

/// The decomposition recipe: substitute every maximal negated subformula by
/// its aux atom, then force each aux atom classical with an excluded-middle
/// disjunct and a double-negated defining axiom.
inline FormulaTranslation translate_formula(const Formula& psi) {
    FormulaTranslation out;
    out.original_atoms = psi.atoms();
    detail::check_no_reserved_atoms(out.original_atoms);

    std::vector<Formula> negs = negocc(psi);
    Formula substituted = psi;
    for (const auto& phi : negs)
        substituted = substituted.substitute(phi, Formula::atom(aux_name_for(phi)));
    out.theory.push_back(substituted);
    for (const auto& phi : negs) {
        Formula x = Formula::atom(aux_name_for(phi));
        out.theory.push_back(Formula::disj(Formula::neg(x), x));
    }
    for (const auto& phi : negs) {
        Formula x = Formula::atom(aux_name_for(phi));
        out.theory.push_back(Formula::neg(Formula::neg(Formula::iff(phi, x))));
        out.aux.emplace(aux_name_for(phi), phi);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rule and program translation (normal -> austere)

inline Atom aux_atom_for(const Atom& a) {
    return Atom{std::string(kAuxPrefix) + "not_" + a.predicate, a.args};
}

/// Austere decomposition of a translated (or already austere) program:
/// indices into the rules of the accompanying program.
struct AustereParts {
    std::vector<int> facts;
    std::vector<int> choices;
    std::vector<int> defines;
    std::vector<int> constraints;
};

struct ProgramTranslation {
    Program program;  // τ(P)
    AustereParts parts;
    std::map<std::string, Atom> aux;       // aux atom text -> negated original atom
    std::set<std::string> original_atoms;  // rendered ground atoms of P

    /// T ⊆ At  ->  T ∪ { x̄_a | ¬a ∈ negocc(P), a ∉ T }.
    std::set<std::string> extend(const std::set<std::string>& t) const {
        std::set<std::string> out = t;
        for (const auto& [name, original] : aux)
            if (!t.count(to_text(original))) out.insert(name);
        return out;
    }

    std::set<std::string> restrict(const std::set<std::string>& t) const {
        std::set<std::string> out;
        for (const auto& a : t)
            if (original_atoms.count(a)) out.insert(a);
        return out;
    }
};

namespace detail {

/// Shared bookkeeping so the choice and constraint pair for one negated
/// literal is emitted once per program.
struct AuxRuleState {
    std::set<std::string> seen;  // rendered original atoms already handled

    /// Appends {x̄_a}←, ⊥←a∧x̄_a and ⊥←¬a∧¬x̄_a on first sight of ¬a.
    void emit_support(const Atom& a, int line, std::vector<Rule>& out) {
        if (!seen.insert(to_text(a)).second) return;
        Atom aux = aux_atom_for(a);
        out.push_back(choice({aux}, {}, line));
        out.push_back(constraint({pos(a), pos(aux)}, line));
        out.push_back(constraint({neg(a), neg(aux)}, line));
    }
};

inline void check_no_reserved_predicates(const Program& p) {
    for (const auto& [name, entry] : p.signature.predicates)
        if (is_aux_name(name))
            throw std::runtime_error("reserved-prefix collision: predicate '" + name +
                                     "' (line " + std::to_string(entry.line) + ")");
}

inline Rule substitute_negated_body(const Rule& r) {
    Rule out = r;
    for (auto& part : out.body) {
        if (auto* lit = std::get_if<Literal>(&part)) {
            if (!lit->negative) continue;
            *lit = pos(aux_atom_for(lit->atom));
        }
    }
    return out;
}

}  // namespace detail

/// Rule-level translation: substitutes negated body literals by their aux
/// atoms and adds, per eliminated literal, a choice plus the two integrity
/// constraints tying the aux atom to the original. `state` deduplicates the
/// support rules across calls; without it each call is self-contained.
inline std::vector<Rule> translate_rule(const Rule& r, detail::AuxRuleState* state = nullptr) {
    if (r.is_choice())
        throw std::runtime_error("translate_rule expects a normal rule or integrity constraint");
    if (const Atom* head = r.head_atom()) {
        if (is_aux_name(head->predicate))
            throw std::runtime_error("reserved-prefix collision: predicate '" + head->predicate +
                                     "'");
    }
    detail::AuxRuleState local;
    detail::AuxRuleState& aux_state = state ? *state : local;

    std::vector<Rule> out;
    out.push_back(detail::substitute_negated_body(r));
    for (const auto& part : r.body) {
        if (const auto* lit = std::get_if<Literal>(&part)) {
            if (!lit->negative) continue;
            if (is_aux_name(lit->atom.predicate))
                throw std::runtime_error("reserved-prefix collision: predicate '" +
                                         lit->atom.predicate + "'");
            aux_state.emit_support(lit->atom, r.line, out);
        } else if (std::holds_alternative<Aggregate>(part) && !r.is_constraint()) {
            throw std::runtime_error("aggregate in a non-constraint body is not supported");
        }
    }
    return out;
}

/// Program-level translation τ(P) = ⋃ τ(r), packaged as an austere
/// quadruple (F,C,D,I). Requires a ground program of normal rules,
/// integrity constraints and plain bodiless choices.
inline ProgramTranslation translate_program(const Program& p) {
    if (!p.is_ground())
        throw std::runtime_error("translate_program expects a ground program; ground it first");
    detail::check_no_reserved_predicates(p);

    ProgramTranslation out;
    detail::AuxRuleState state;
    std::vector<Rule> original_rules;  // substituted originals, program order
    std::vector<Rule> support_rules;   // choices + constraint pairs, first-need order

    for (const auto& r : p.rules) {
        if (const auto* c = std::get_if<ChoiceHead>(&r.head)) {
            if (c->bounded())
                throw std::runtime_error(
                    "bounded choice head: eliminate aggregate heads before translating");
            if (!r.body.empty())
                throw std::runtime_error("choice rule with body is not austere; ground+simplify "
                                         "or rewrite it first");
            original_rules.push_back(r);
            continue;
        }
        std::vector<Rule> t = translate_rule(r, &state);
        original_rules.push_back(std::move(t.front()));
        for (std::size_t i = 1; i < t.size(); ++i) support_rules.push_back(std::move(t[i]));
    }

    // Rendered original vocabulary and the aux map.
    for (const auto& r : p.rules) {
        if (const Atom* head = r.head_atom()) out.original_atoms.insert(to_text(*head));
        if (const auto* c = std::get_if<ChoiceHead>(&r.head))
            for (const auto& e : c->elements) out.original_atoms.insert(to_text(e.atom));
        for (const auto& part : r.body) {
            if (const auto* lit = std::get_if<Literal>(&part)) {
                out.original_atoms.insert(to_text(lit->atom));
                if (lit->negative) out.aux.emplace(to_text(aux_atom_for(lit->atom)), lit->atom);
            } else if (const auto* agg = std::get_if<Aggregate>(&part)) {
                for (const auto& e : agg->elements) out.original_atoms.insert(to_text(e.atom));
            }
        }
    }

    Program& q = out.program;
    q.minimizes = p.minimizes;
    q.shows = p.shows;
    q.consts = p.consts;
    for (auto& r : original_rules) q.rules.push_back(std::move(r));
    for (auto& r : support_rules) q.rules.push_back(std::move(r));
    for (const auto& r : q.rules) {
        // Re-register predicates (aux predicates are new).
        if (const Atom* head = r.head_atom()) q.signature.declare(head->predicate, head->arity(), r.line);
        if (const auto* c = std::get_if<ChoiceHead>(&r.head))
            for (const auto& e : c->elements)
                q.signature.declare(e.atom.predicate, e.atom.arity(), r.line);
        for (const auto& part : r.body)
            if (const auto* lit = std::get_if<Literal>(&part))
                q.signature.declare(lit->atom.predicate, lit->atom.arity(), r.line);
    }

    for (int i = 0; i < static_cast<int>(q.rules.size()); ++i) {
        switch (q.rules[i].kind()) {
            case RuleKind::Fact: out.parts.facts.push_back(i); break;
            case RuleKind::Choice: out.parts.choices.push_back(i); break;
            case RuleKind::Constraint: out.parts.constraints.push_back(i); break;
            default: out.parts.defines.push_back(i); break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Choice elimination and aggregate heads

/// Rewrites a bodiless single-atom choice {a}← into the classic pair of
/// normal rules a ← ¬a', a' ← ¬a over a fresh complement atom.
inline std::vector<Rule> choice_to_normal(const Rule& r, const Signature& sig) {
    const auto* c = std::get_if<ChoiceHead>(&r.head);
    if (!c || c->bounded() || !r.body.empty() || c->elements.size() != 1 ||
        !c->elements.front().condition.empty())
        throw std::runtime_error(
            "choice_to_normal expects a bodiless single-atom choice; eliminate bounds first");
    const Atom& a = c->elements.front().atom;
    Atom prime = aux_atom_for(a);
    if (sig.contains(prime.predicate))
        throw std::runtime_error("name collision: predicate '" + prime.predicate +
                                 "' already exists");
    return {rule(a, {neg(prime)}, r.line), rule(prime, {neg(a)}, r.line)};
}

/// Rewrites a bounded choice (#count aggregate head) into a plain choice
/// plus the bound-enforcing integrity constraint, body copied into both.
/// Unconstraining bounds drop the guard; an unbounded choice is returned
/// unchanged.
inline std::vector<Rule> eliminate_aggregate_head(const Rule& r) {
    const auto* c = std::get_if<ChoiceHead>(&r.head);
    if (!c) throw std::runtime_error("eliminate_aggregate_head expects a choice/aggregate head");
    if (!c->bounded()) return {r};

    auto left_trivial = [&]() {
        if (!c->left) return true;
        if (c->left->bound.kind() != Term::Kind::Number) return false;
        long long v = c->left->bound.number();
        return (c->left->op == RelOp::Le && v <= 0) || (c->left->op == RelOp::Lt && v < 0);
    };

    Rule choice_rule;
    choice_rule.line = r.line;
    ChoiceHead pure;
    pure.elements = c->elements;
    choice_rule.body = r.body;
    if (pure.elements.size() == 1 && !pure.elements.front().condition.empty()) {
        // Single element: hoist the condition into the body.
        for (const auto& cond : pure.elements.front().condition) {
            if (const auto* lit = std::get_if<Literal>(&cond))
                choice_rule.body.push_back(*lit);
            else
                choice_rule.body.push_back(std::get<Comparison>(cond));
        }
        pure.elements.front().condition.clear();
    }
    choice_rule.head = std::move(pure);

    std::vector<Rule> out;
    out.push_back(std::move(choice_rule));

    bool guard_needed = c->right.has_value() || !left_trivial();
    if (guard_needed) {
        Aggregate agg;
        agg.negated = true;
        agg.left = c->left;
        agg.right = c->right;
        agg.elements = c->elements;
        Rule guard;
        guard.head = ConstraintHead{};
        guard.line = r.line;
        guard.body.push_back(std::move(agg));
        for (const auto& part : r.body) guard.body.push_back(part);
        out.push_back(std::move(guard));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Debugging rewrite

struct DebugInfo {
    struct Entry {
        std::string label;      // functor of the ic argument, e.g. "c8"
        int line = 0;           // source line of the original constraint
        Rule original;          // the constraint that was rewritten
    };
    std::vector<Entry> entries;

    const Entry* find(const std::string& label) const {
        for (const auto& e : entries)
            if (e.label == label) return &e;
        return nullptr;
    }
};

namespace detail {

inline void collect_variables(const Term& t, std::vector<std::string>& out) {
    if (t.kind() == Term::Kind::Variable) {
        if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
        return;
    }
    for (const auto& a : t.args()) collect_variables(a, out);
}

/// Global variables of a constraint body (aggregate-local variables are not
/// part of the identifier term).
inline std::vector<std::string> constraint_variables(const Rule& r) {
    std::vector<std::string> out;
    for (const auto& part : r.body) {
        if (const auto* lit = std::get_if<Literal>(&part)) {
            for (const auto& t : lit->atom.args) collect_variables(t, out);
        } else if (const auto* cmp = std::get_if<Comparison>(&part)) {
            collect_variables(cmp->lhs, out);
            collect_variables(cmp->rhs, out);
        }
    }
    return out;
}

}  // namespace detail

/// Debugging rewrite: each integrity constraint ⊥←body on line L becomes
/// ic(cL(vars))←body, plus one #minimize{ic(I)} directive, so solving
/// minimizes the number of violated constraint instances.
inline Program debug_transform(const Program& p, DebugInfo* info = nullptr) {
    if (p.signature.contains("ic"))
        throw std::runtime_error("debug_transform: predicate 'ic' is already used by the program");

    Program out = p;
    bool any = false;
    for (auto& r : out.rules) {
        if (!r.is_constraint()) continue;
        any = true;
        std::string label = "c" + std::to_string(r.line);
        std::vector<std::string> vars = detail::constraint_variables(r);
        Term id;
        if (vars.empty()) {
            id = Term::symbol(label);
        } else {
            std::vector<Term> args;
            for (const auto& v : vars) args.push_back(Term::variable(v));
            id = Term::function(label, std::move(args));
        }
        if (info) info->entries.push_back({label, r.line, r});
        r.head = Atom{"ic", {std::move(id)}};
    }
    if (!any) return out;

    out.signature.declare("ic", 1, 0);
    MinimizeDirective dir;
    MinimizeElement elem;
    elem.tuple.push_back(Term::function("ic", {Term::variable("I")}));
    dir.elements.push_back(std::move(elem));
    out.minimizes.push_back(std::move(dir));
    return out;
}

}  // namespace austere
