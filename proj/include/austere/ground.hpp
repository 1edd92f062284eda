#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "austere/analysis.hpp"
#include "austere/print.hpp"
#include "austere/syntax.hpp"

namespace austere {

class ground_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bijection between ground atoms and dense ids; interning order is the
/// id order and stays stable within a run.
struct AtomTable {
    std::vector<Atom> atoms;
    std::vector<std::string> names;
    std::unordered_map<std::string, int> ids;

    int intern(const Atom& a) {
        std::string key = to_text(a);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(atoms.size());
        atoms.push_back(a);
        names.push_back(key);
        ids.emplace(std::move(key), id);
        return id;
    }

    int find(const std::string& name) const {
        auto it = ids.find(name);
        return it == ids.end() ? -1 : it->second;
    }

    int size() const { return static_cast<int>(atoms.size()); }
};

struct GroundLit {
    int atom = -1;
    bool negative = false;
};

struct GroundAggregate {
    struct Element {
        std::string tuple;            // identity of the element instance
        int atom = -1;
        std::vector<GroundLit> cond;  // residual condition literals
    };
    bool negated = false;
    std::optional<std::pair<RelOp, long long>> left;   // bound REL count
    std::optional<std::pair<RelOp, long long>> right;  // count REL bound
    std::vector<Element> elements;
};

struct GroundProgram {
    AtomTable table;
    std::vector<int> facts;         // certain atoms, sorted
    std::vector<int> choice_atoms;  // F_C: one entry per ground choice {a}<-, sorted

    struct DefineRule {
        int head = -1;
        std::vector<int> pos;
        std::vector<int> neg;
        int line = 0;
    };
    std::vector<DefineRule> defines;

    struct Constraint {
        std::vector<int> pos;
        std::vector<int> neg;
        std::vector<GroundAggregate> aggregates;
        int line = 0;
        int source_rule = -1;  // index into the source program
    };
    std::vector<Constraint> constraints;

    struct MinimizeElem {
        long long weight = 1;
        std::string tuple;
        std::vector<std::vector<GroundLit>> alternatives;  // satisfied if any holds
    };
    std::vector<MinimizeElem> minimize;

    std::vector<ShowDirective> shows;

    // Predicate -> define-stratum ordinal (0-based among define strata);
    // facts and choice predicates are absent. Used by stratified evaluation.
    std::map<std::string, int> define_stratum;
    int define_strata_count = 0;

    bool is_definite() const {
        for (const auto& r : defines)
            if (!r.neg.empty()) return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// Term evaluation and matching

namespace detail {

using Bindings = std::map<std::string, Term>;

inline Term eval_term(const Term& t, const Bindings& b, int line) {
    switch (t.kind()) {
        case Term::Kind::Number:
        case Term::Kind::Symbol: return t;
        case Term::Kind::Variable: {
            auto it = b.find(t.name());
            if (it == b.end())
                throw ground_error(std::to_string(line) + ": unbound variable '" + t.name() + "'");
            return it->second;
        }
        case Term::Kind::Function: {
            std::vector<Term> args;
            args.reserve(t.args().size());
            for (const auto& a : t.args()) args.push_back(eval_term(a, b, line));
            return Term::function(t.name(), std::move(args));
        }
        case Term::Kind::Arith: {
            Term l = eval_term(t.args()[0], b, line);
            Term r = eval_term(t.args()[1], b, line);
            if (l.kind() != Term::Kind::Number || r.kind() != Term::Kind::Number)
                throw ground_error(std::to_string(line) + ": arithmetic on non-integer term '" +
                                   to_text(t) + "'");
            switch (t.op()) {
                case ArithOp::Add: return Term::number(l.number() + r.number());
                case ArithOp::Sub: return Term::number(l.number() - r.number());
                case ArithOp::Mul: return Term::number(l.number() * r.number());
                case ArithOp::Div:
                    if (r.number() == 0)
                        throw ground_error(std::to_string(line) + ": division by zero");
                    return Term::number(l.number() / r.number());
            }
            return Term::number(0);
        }
        case Term::Kind::Interval:
            throw ground_error(std::to_string(line) + ": interval in unsupported position");
    }
    return t;
}

inline void collect_vars(const Term& t, std::set<std::string>& out) {
    if (t.kind() == Term::Kind::Variable) {
        out.insert(t.name());
        return;
    }
    for (const auto& a : t.args()) collect_vars(a, out);
}

inline std::set<std::string> vars_of(const Atom& a) {
    std::set<std::string> out;
    for (const auto& t : a.args) collect_vars(t, out);
    return out;
}

/// Can this term be evaluated under the given bound variables?
inline bool evaluable(const Term& t, const std::set<std::string>& bound) {
    std::set<std::string> vars;
    collect_vars(t, vars);
    for (const auto& v : vars)
        if (!bound.count(v)) return false;
    return true;
}

/// Matches a (possibly non-ground) pattern term against a ground term,
/// extending the bindings. Arithmetic subterms must be evaluable.
inline bool match_term(const Term& pattern, const Term& value, Bindings& b, int line) {
    switch (pattern.kind()) {
        case Term::Kind::Variable: {
            auto it = b.find(pattern.name());
            if (it != b.end()) return it->second == value;
            b.emplace(pattern.name(), value);
            return true;
        }
        case Term::Kind::Number:
        case Term::Kind::Symbol: return pattern == value;
        case Term::Kind::Function: {
            if (value.kind() != Term::Kind::Function || value.name() != pattern.name() ||
                value.args().size() != pattern.args().size())
                return false;
            for (std::size_t i = 0; i < pattern.args().size(); ++i)
                if (!match_term(pattern.args()[i], value.args()[i], b, line)) return false;
            return true;
        }
        case Term::Kind::Arith: return eval_term(pattern, b, line) == value;
        case Term::Kind::Interval:
            throw ground_error(std::to_string(line) + ": interval in unsupported position");
    }
    return false;
}

inline bool match_atom(const Atom& pattern, const Atom& value, Bindings& b, int line) {
    if (pattern.predicate != value.predicate || pattern.args.size() != value.args.size())
        return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!match_term(pattern.args[i], value.args[i], b, line)) return false;
    return true;
}

inline long long as_int(const Term& t, int line) {
    if (t.kind() != Term::Kind::Number)
        throw ground_error(std::to_string(line) + ": expected integer, got '" + to_text(t) + "'");
    return t.number();
}

inline bool compare_ground(const Term& lhs, RelOp op, const Term& rhs, int line) {
    // Interval membership: t = l..u / t != l..u.
    const Term* interval = nullptr;
    const Term* scalar = nullptr;
    if (lhs.kind() == Term::Kind::Interval) {
        interval = &lhs;
        scalar = &rhs;
    } else if (rhs.kind() == Term::Kind::Interval) {
        interval = &rhs;
        scalar = &lhs;
    }
    if (interval) {
        if (op != RelOp::Eq && op != RelOp::Ne)
            throw ground_error(std::to_string(line) + ": interval comparison supports = and != only");
        long long lo = as_int(interval->args()[0], line);
        long long hi = as_int(interval->args()[1], line);
        long long v = as_int(*scalar, line);
        bool member = lo <= v && v <= hi;
        return op == RelOp::Eq ? member : !member;
    }
    if (lhs.kind() == Term::Kind::Number && rhs.kind() == Term::Kind::Number) {
        long long a = lhs.number(), b = rhs.number();
        switch (op) {
            case RelOp::Eq: return a == b;
            case RelOp::Ne: return a != b;
            case RelOp::Lt: return a < b;
            case RelOp::Le: return a <= b;
            case RelOp::Gt: return a > b;
            case RelOp::Ge: return a >= b;
        }
    }
    switch (op) {  // symbols and mixed kinds: total order via Term::operator<
        case RelOp::Eq: return lhs == rhs;
        case RelOp::Ne: return !(lhs == rhs);
        case RelOp::Lt: return lhs < rhs;
        case RelOp::Le: return lhs < rhs || lhs == rhs;
        case RelOp::Gt: return rhs < lhs;
        case RelOp::Ge: return rhs < lhs || rhs == lhs;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Body scheduling: order parts so every variable is bound when needed.

struct ScheduledPart {
    enum class Role {
        PositiveLiteral,   // generator: joins against the domain
        BindComparison,    // generator: V = expr or V = l..u
        TestComparison,    // evaluated once bound
        NegativeLiteral,   // three-valued test at emission
        AggregatePart,     // constraints only, expanded at emission
    };
    Role role;
    const Literal* literal = nullptr;
    const Comparison* comparison = nullptr;
    const Aggregate* aggregate = nullptr;
    bool bind_lhs = false;  // for BindComparison: which side is the variable
};

inline bool atom_args_matchable(const Atom& a, const std::set<std::string>& bound) {
    // An argument that is an arithmetic expression must be evaluable; plain
    // variables and everything else bind or compare structurally.
    for (const auto& t : a.args) {
        if (t.kind() == Term::Kind::Arith && !evaluable(t, bound)) return false;
        if (t.kind() == Term::Kind::Interval) return false;
        if (t.kind() == Term::Kind::Function)
            for (const auto& sub : t.args())
                if (sub.kind() == Term::Kind::Arith && !evaluable(sub, bound)) return false;
    }
    return true;
}

/// Greedy scheduling of body parts; throws a safety error when some
/// variable cannot be bound by any positive literal or binding comparison.
inline std::vector<ScheduledPart> schedule_body(
    const std::vector<const Literal*>& pos_literals, const std::vector<const Literal*>& neg_literals,
    const std::vector<const Comparison*>& comparisons, const std::vector<const Aggregate*>& aggregates,
    std::set<std::string>& bound, int line) {
    std::vector<ScheduledPart> out;
    std::vector<bool> pos_done(pos_literals.size()), cmp_done(comparisons.size());

    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t i = 0; i < pos_literals.size(); ++i) {
            if (pos_done[i]) continue;
            if (!atom_args_matchable(pos_literals[i]->atom, bound)) continue;
            pos_done[i] = true;
            for (const auto& v : vars_of(pos_literals[i]->atom)) bound.insert(v);
            out.push_back({ScheduledPart::Role::PositiveLiteral, pos_literals[i]});
            progress = true;
        }
        for (std::size_t i = 0; i < comparisons.size(); ++i) {
            if (cmp_done[i]) continue;
            const Comparison& c = *comparisons[i];
            bool lhs_ok = evaluable(c.lhs, bound);
            bool rhs_ok = evaluable(c.rhs, bound);
            if (lhs_ok && rhs_ok) {
                cmp_done[i] = true;
                ScheduledPart p{ScheduledPart::Role::TestComparison};
                p.comparison = &c;
                out.push_back(p);
                progress = true;
            } else if (c.op == RelOp::Eq && c.lhs.kind() == Term::Kind::Variable && rhs_ok) {
                cmp_done[i] = true;
                bound.insert(c.lhs.name());
                ScheduledPart p{ScheduledPart::Role::BindComparison};
                p.comparison = &c;
                p.bind_lhs = true;
                out.push_back(p);
                progress = true;
            } else if (c.op == RelOp::Eq && c.rhs.kind() == Term::Kind::Variable && lhs_ok) {
                cmp_done[i] = true;
                bound.insert(c.rhs.name());
                ScheduledPart p{ScheduledPart::Role::BindComparison};
                p.comparison = &c;
                p.bind_lhs = false;
                out.push_back(p);
                progress = true;
            }
        }
    }
    for (std::size_t i = 0; i < pos_literals.size(); ++i)
        if (!pos_done[i]) {
            for (const auto& t : pos_literals[i]->atom.args)
                if (t.has_interval())
                    throw ground_error(std::to_string(line) +
                                       ": interval in unsupported position (literal argument)");
            for (const auto& v : vars_of(pos_literals[i]->atom))
                if (!bound.count(v))
                    throw ground_error(std::to_string(line) + ": unsafe rule: variable '" + v +
                                       "' cannot be bound");
            throw ground_error(std::to_string(line) + ": cannot schedule literal '" +
                               to_text(pos_literals[i]->atom) + "'");
        }
    for (std::size_t i = 0; i < comparisons.size(); ++i)
        if (!cmp_done[i]) {
            std::set<std::string> vars;
            collect_vars(comparisons[i]->lhs, vars);
            collect_vars(comparisons[i]->rhs, vars);
            for (const auto& v : vars)
                if (!bound.count(v))
                    throw ground_error(std::to_string(line) + ": unsafe rule: variable '" + v +
                                       "' cannot be bound");
            throw ground_error(std::to_string(line) + ": cannot schedule comparison '" +
                               to_text(*comparisons[i]) + "'");
        }
    for (const Literal* l : neg_literals) {
        for (const auto& v : vars_of(l->atom))
            if (!bound.count(v))
                throw ground_error(std::to_string(line) + ": unsafe rule: variable '" + v +
                                   "' occurs only in negative literal 'not " + to_text(l->atom) +
                                   "'");
        ScheduledPart p{ScheduledPart::Role::NegativeLiteral};
        p.literal = l;
        out.push_back(p);
    }
    for (const Aggregate* a : aggregates) {
        ScheduledPart p{ScheduledPart::Role::AggregatePart};
        p.aggregate = a;
        out.push_back(p);
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The grounder

class Grounder {
public:
    explicit Grounder(const Program& p) : program_(p) {}

    GroundProgram run() {
        collect_facts();
        saturate();
        emit();
        compact();
        attach_strata();
        return std::move(out_);
    }

private:
    using Bindings = detail::Bindings;

    struct PredDomain {
        std::vector<int> atoms;  // ids, interning order
    };

    const Program& program_;
    GroundProgram out_;
    std::map<std::string, PredDomain> domain_;
    std::unordered_set<int> certain_;  // expanded facts
    std::unordered_set<int> in_domain_;

    bool add_atom(const Atom& a) {
        int id = out_.table.intern(a);
        if (in_domain_.insert(id).second) {
            if (out_.table.size() > 2000000)
                throw ground_error("grounding exceeds the atom limit (runaway term growth?)");
            domain_[a.predicate].atoms.push_back(id);
            return true;
        }
        return false;
    }

    void collect_facts() {
        for (const auto& r : program_.rules) {
            if (r.kind() != RuleKind::Fact) continue;
            const Atom* head = r.head_atom();
            if (!head->is_ground())
                throw ground_error(std::to_string(r.line) + ": unsafe rule: variable in fact");
            add_atom(*head);
            certain_.insert(out_.table.intern(*head));
        }
    }

    struct SplitBody {
        std::vector<const Literal*> pos, neg;
        std::vector<const Comparison*> cmps;
        std::vector<const Aggregate*> aggs;
    };

    static SplitBody split(const std::vector<BodyPart>& body) {
        SplitBody s;
        for (const auto& part : body) {
            if (const auto* lit = std::get_if<Literal>(&part)) {
                (lit->negative ? s.neg : s.pos).push_back(lit);
            } else if (const auto* cmp = std::get_if<Comparison>(&part)) {
                s.cmps.push_back(cmp);
            } else {
                s.aggs.push_back(&std::get<Aggregate>(part));
            }
        }
        return s;
    }

    static SplitBody split_condition(const std::vector<CondLit>& cond) {
        SplitBody s;
        for (const auto& c : cond) {
            if (const auto* lit = std::get_if<Literal>(&c)) {
                (lit->negative ? s.neg : s.pos).push_back(lit);
            } else {
                s.cmps.push_back(&std::get<Comparison>(c));
            }
        }
        return s;
    }

    /// Enumerates all substitutions for the scheduled parts, calling emit
    /// for each complete one. Negative literals and aggregates are skipped
    /// here; instance-level handling happens in the caller.
    template <typename F>
    void instantiate(const std::vector<detail::ScheduledPart>& parts, std::size_t i, Bindings& b,
                     int line, const F& emit) {
        if (i == parts.size()) {
            emit(b);
            return;
        }
        const auto& part = parts[i];
        using Role = detail::ScheduledPart::Role;
        switch (part.role) {
            case Role::PositiveLiteral: {
                const auto& dom = domain_[part.literal->atom.predicate];
                // Copy: the domain may grow while we iterate during saturation.
                std::vector<int> snapshot = dom.atoms;
                for (int id : snapshot) {
                    Bindings saved = b;
                    if (detail::match_atom(part.literal->atom, out_.table.atoms[id], b, line))
                        instantiate(parts, i + 1, b, line, emit);
                    b = std::move(saved);
                }
                return;
            }
            case Role::BindComparison: {
                const Comparison& c = *part.comparison;
                const Term& var = part.bind_lhs ? c.lhs : c.rhs;
                const Term& expr = part.bind_lhs ? c.rhs : c.lhs;
                if (expr.kind() == Term::Kind::Interval) {
                    long long lo =
                        detail::as_int(detail::eval_term(expr.args()[0], b, line), line);
                    long long hi =
                        detail::as_int(detail::eval_term(expr.args()[1], b, line), line);
                    for (long long v = lo; v <= hi; ++v) {
                        Bindings saved = b;
                        b[var.name()] = Term::number(v);
                        instantiate(parts, i + 1, b, line, emit);
                        b = std::move(saved);
                    }
                } else {
                    Bindings saved = b;
                    b[var.name()] = detail::eval_term(expr, b, line);
                    instantiate(parts, i + 1, b, line, emit);
                    b = std::move(saved);
                }
                return;
            }
            case Role::TestComparison: {
                const Comparison& c = *part.comparison;
                Term lhs = c.lhs.kind() == Term::Kind::Interval
                               ? Term::interval(detail::eval_term(c.lhs.args()[0], b, line),
                                                detail::eval_term(c.lhs.args()[1], b, line))
                               : detail::eval_term(c.lhs, b, line);
                Term rhs = c.rhs.kind() == Term::Kind::Interval
                               ? Term::interval(detail::eval_term(c.rhs.args()[0], b, line),
                                                detail::eval_term(c.rhs.args()[1], b, line))
                               : detail::eval_term(c.rhs, b, line);
                if (detail::compare_ground(lhs, c.op, rhs, line))
                    instantiate(parts, i + 1, b, line, emit);
                return;
            }
            case Role::NegativeLiteral:
            case Role::AggregatePart:
                instantiate(parts, i + 1, b, line, emit);
                return;
        }
    }

    std::vector<detail::ScheduledPart> schedule_rule(const Rule& r, const SplitBody& s,
                                                     std::set<std::string>* bound_out = nullptr) {
        std::set<std::string> bound;
        auto parts = detail::schedule_body(s.pos, s.neg, s.cmps, s.aggs, bound, r.line);
        // Head variables must be bound.
        if (const Atom* head = r.head_atom()) {
            for (const auto& v : detail::vars_of(*head))
                if (!bound.count(v))
                    throw ground_error(std::to_string(r.line) + ": unsafe rule: variable '" + v +
                                       "' in head is not bound by the body");
        }
        if (bound_out) *bound_out = bound;
        return parts;
    }

    /// One saturation pass over a normal rule: adds derivable head atoms.
    bool saturate_normal(const Rule& r) {
        SplitBody s = split(r.body);
        if (!s.aggs.empty())
            throw ground_error(std::to_string(r.line) +
                               ": aggregates are only supported in integrity constraints");
        auto parts = schedule_rule(r, s);
        bool added = false;
        Bindings b;
        instantiate(parts, 0, b, r.line, [&](const Bindings& bb) {
            Atom head = ground_atom(*r.head_atom(), bb, r.line);
            added |= add_atom(head);
        });
        return added;
    }

    bool saturate_choice(const Rule& r) {
        const auto& c = std::get<ChoiceHead>(r.head);
        SplitBody body = split(r.body);
        if (!body.aggs.empty())
            throw ground_error(std::to_string(r.line) + ": aggregate in a choice body");
        bool added = false;
        for (const auto& e : c.elements) {
            SplitBody merged = body;
            SplitBody cond = split_condition(e.condition);
            for (auto* x : cond.pos) merged.pos.push_back(x);
            for (auto* x : cond.neg) merged.neg.push_back(x);
            for (auto* x : cond.cmps) merged.cmps.push_back(x);
            std::set<std::string> bound;
            auto parts = detail::schedule_body(merged.pos, merged.neg, merged.cmps, {}, bound, r.line);
            for (const auto& v : detail::vars_of(e.atom))
                if (!bound.count(v))
                    throw ground_error(std::to_string(r.line) + ": unsafe rule: variable '" + v +
                                       "' in choice element is not bound");
            Bindings b;
            instantiate(parts, 0, b, r.line, [&](const Bindings& bb) {
                added |= add_atom(ground_atom(e.atom, bb, r.line));
            });
        }
        return added;
    }

    void saturate() {
        bool changed = true;
        int rounds = 0;
        while (changed) {
            changed = false;
            if (++rounds > 10000)
                throw ground_error("grounding did not converge (runaway term growth?)");
            for (const auto& r : program_.rules) {
                switch (r.kind()) {
                    case RuleKind::Fact: break;
                    case RuleKind::Choice: changed |= saturate_choice(r); break;
                    case RuleKind::Constraint: break;
                    default: changed |= saturate_normal(r); break;
                }
            }
        }
    }

    static Atom ground_atom(const Atom& a, const Bindings& b, int line) {
        Atom out;
        out.predicate = a.predicate;
        out.args.reserve(a.args.size());
        for (const auto& t : a.args) out.args.push_back(detail::eval_term(t, b, line));
        return out;
    }

    /// Three-valued status of a ground literal at emission time.
    enum class LitStatus { True, False, Open };

    LitStatus status(const Atom& ground, bool negative) const {
        auto it = out_.table.ids.find(to_text(ground));
        bool known = it != out_.table.ids.end() && in_domain_.count(it->second);
        bool fact = known && certain_.count(it->second);
        if (!negative) {
            if (fact) return LitStatus::True;
            if (!known) return LitStatus::False;
            return LitStatus::Open;
        }
        if (!known) return LitStatus::True;
        if (fact) return LitStatus::False;
        return LitStatus::Open;
    }

    void emit() {
        std::unordered_set<std::string> seen_rules;
        std::set<int> choice_set;
        std::map<std::string, std::size_t> minimize_index;

        for (int idx = 0; idx < static_cast<int>(program_.rules.size()); ++idx) {
            const Rule& r = program_.rules[idx];
            switch (r.kind()) {
                case RuleKind::Fact: break;
                case RuleKind::Choice: emit_choice(r, choice_set); break;
                case RuleKind::Constraint: emit_constraint(r, idx, seen_rules); break;
                default: emit_normal(r, seen_rules); break;
            }
        }
        for (const auto& m : program_.minimizes) emit_minimize(m, minimize_index);

        out_.facts.assign(certain_.begin(), certain_.end());
        std::sort(out_.facts.begin(), out_.facts.end());
        for (int id : out_.facts) choice_set.erase(id);  // facts are already in
        out_.choice_atoms.assign(choice_set.begin(), choice_set.end());
        out_.shows = program_.shows;
    }

    void emit_normal(const Rule& r, std::unordered_set<std::string>& seen) {
        SplitBody s = split(r.body);
        auto parts = schedule_rule(r, s);
        Bindings b;
        instantiate(parts, 0, b, r.line, [&](const Bindings& bb) {
            GroundProgram::DefineRule rule;
            rule.line = r.line;
            Atom head = ground_atom(*r.head_atom(), bb, r.line);
            rule.head = out_.table.intern(head);
            if (!build_literals(s, bb, r.line, rule.pos, rule.neg)) return;
            if (rule.pos.empty() && rule.neg.empty()) {
                certain_.insert(rule.head);  // body certainly true: a fact
                return;
            }
            std::string key = rule_key('r', rule.head, rule.pos, rule.neg);
            if (seen.insert(key).second) out_.defines.push_back(std::move(rule));
        });
    }

    void emit_choice(const Rule& r, std::set<int>& choice_set) {
        const auto& c = std::get<ChoiceHead>(r.head);
        if (c.bounded())
            throw ground_error(std::to_string(r.line) +
                               ": bounded choice head; run the aggregate elimination first");
        SplitBody body = split(r.body);
        for (const auto& e : c.elements) {
            SplitBody merged = body;
            SplitBody cond = split_condition(e.condition);
            for (auto* x : cond.pos) merged.pos.push_back(x);
            for (auto* x : cond.neg) merged.neg.push_back(x);
            for (auto* x : cond.cmps) merged.cmps.push_back(x);
            std::set<std::string> bound;
            auto parts =
                detail::schedule_body(merged.pos, merged.neg, merged.cmps, {}, bound, r.line);
            Bindings b;
            instantiate(parts, 0, b, r.line, [&](const Bindings& bb) {
                std::vector<int> pos, neg;
                if (!build_literals(merged, bb, r.line, pos, neg)) return;
                Atom head = ground_atom(e.atom, bb, r.line);
                if (!pos.empty() || !neg.empty())
                    throw ground_error(
                        std::to_string(r.line) +
                        ": choice body does not reduce to facts at grounding; rewrite the "
                        "choice (only instance predicates may guard a choice)");
                choice_set.insert(out_.table.intern(head));
            });
        }
    }

    void emit_constraint(const Rule& r, int source_index, std::unordered_set<std::string>& seen) {
        SplitBody s = split(r.body);
        std::set<std::string> bound;
        auto parts = detail::schedule_body(s.pos, s.neg, s.cmps, s.aggs, bound, r.line);
        Bindings b;
        instantiate(parts, 0, b, r.line, [&](const Bindings& bb) {
            GroundProgram::Constraint con;
            con.line = r.line;
            con.source_rule = source_index;
            if (!build_literals(s, bb, r.line, con.pos, con.neg)) return;
            for (const Aggregate* agg : s.aggs)
                con.aggregates.push_back(ground_aggregate(*agg, bb, r.line));
            std::string key = rule_key('c', -1, con.pos, con.neg);
            for (const auto& agg : con.aggregates) {
                key += '|';
                key += agg.negated ? '!' : '+';
                for (const auto& e : agg.elements) key += e.tuple + ";";
            }
            if (seen.insert(key).second) out_.constraints.push_back(std::move(con));
        });
    }

    /// Simplifies the literal parts of one instance against the certain
    /// facts. Returns false when the body is certainly false.
    bool build_literals(const SplitBody& s, const Bindings& b, int line, std::vector<int>& pos,
                        std::vector<int>& neg) {
        for (const Literal* lit : s.pos) {
            Atom g = ground_atom(lit->atom, b, line);
            switch (status(g, false)) {
                case LitStatus::True: break;  // fact: drop
                case LitStatus::False: return false;
                case LitStatus::Open: pos.push_back(out_.table.intern(g)); break;
            }
        }
        for (const Literal* lit : s.neg) {
            Atom g = ground_atom(lit->atom, b, line);
            switch (status(g, true)) {
                case LitStatus::True: break;  // atom can never hold: drop
                case LitStatus::False: return false;
                case LitStatus::Open: neg.push_back(out_.table.intern(g)); break;
            }
        }
        std::sort(pos.begin(), pos.end());
        pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
        std::sort(neg.begin(), neg.end());
        neg.erase(std::unique(neg.begin(), neg.end()), neg.end());
        return true;
    }

    /// Grounds one aggregate under the global bindings.
    GroundAggregate ground_aggregate(const Aggregate& agg, const Bindings& global, int line) {
        GroundAggregate out;
        out.negated = agg.negated;
        if (agg.left)
            out.left = {agg.left->op,
                        detail::as_int(detail::eval_term(agg.left->bound, global, line), line)};
        if (agg.right)
            out.right = {agg.right->op,
                         detail::as_int(detail::eval_term(agg.right->bound, global, line), line)};
        std::set<std::string> seen_tuples;
        for (const auto& e : agg.elements) {
            SplitBody cond = split_condition(e.condition);
            std::set<std::string> bound;
            for (const auto& [v, t] : global) bound.insert(v);
            auto parts = detail::schedule_body(cond.pos, cond.neg, cond.cmps, {}, bound, line);
            for (const auto& v : detail::vars_of(e.atom))
                if (!bound.count(v))
                    throw ground_error(std::to_string(line) + ": unsafe aggregate element: '" +
                                       v + "' is not bound by the condition");
            Bindings b = global;
            instantiate(parts, 0, b, line, [&](const Bindings& bb) {
                Atom atom = ground_atom(e.atom, bb, line);
                if (status(atom, false) == LitStatus::False) return;  // never true
                GroundAggregate::Element elem;
                elem.atom = out_.table.intern(atom);
                elem.tuple = to_text(atom);
                if (!seen_tuples.insert(elem.tuple).second) return;
                std::vector<int> pos, neg;
                if (!build_literals(cond, bb, line, pos, neg)) return;
                for (int id : pos) elem.cond.push_back({id, false});
                for (int id : neg) elem.cond.push_back({id, true});
                out.elements.push_back(std::move(elem));
            });
        }
        return out;
    }

    void emit_minimize(const MinimizeDirective& m, std::map<std::string, std::size_t>& index) {
        for (const auto& e : m.elements) {
            // Schematic form #minimize{ p(X) }: a lone atom-shaped term with
            // no condition stands for weight 1 with the atom as condition.
            MinimizeElement elem = e;
            if (elem.condition.empty() && elem.tuple.size() == 1 &&
                (elem.tuple[0].kind() == Term::Kind::Function ||
                 elem.tuple[0].kind() == Term::Kind::Symbol)) {
                const Term& t = elem.tuple[0];
                Atom implied;
                implied.predicate = t.name();
                if (t.kind() == Term::Kind::Function) implied.args = t.args();
                if (program_.signature.contains(implied.predicate))
                    elem.condition.push_back(Literal{false, implied});
            }
            SplitBody cond = split_condition(elem.condition);
            std::set<std::string> bound;
            auto parts =
                detail::schedule_body(cond.pos, cond.neg, cond.cmps, {}, bound, m.line);
            for (const auto& t : elem.tuple)
                for (const auto& v : [&] {
                         std::set<std::string> vars;
                         detail::collect_vars(t, vars);
                         return vars;
                     }())
                    if (!bound.count(v))
                        throw ground_error(std::to_string(m.line) +
                                           ": unsafe #minimize element: variable '" + v +
                                           "' is not bound by the condition");
            Bindings b;
            instantiate(parts, 0, b, m.line, [&](const Bindings& bb) {
                std::vector<int> pos, neg;
                if (!build_literals(cond, bb, m.line, pos, neg)) return;
                std::vector<Term> tuple;
                for (const auto& t : elem.tuple)
                    tuple.push_back(detail::eval_term(t, bb, m.line));
                long long weight = 1;
                if (tuple.front().kind() == Term::Kind::Number) {
                    weight = tuple.front().number();
                } else if (tuple.size() > 1) {
                    throw ground_error(std::to_string(m.line) +
                                       ": non-integer weight in #minimize element");
                }
                std::string key;
                for (const auto& t : tuple) key += to_text(t) + ",";
                std::vector<GroundLit> alt;
                for (int id : pos) alt.push_back({id, false});
                for (int id : neg) alt.push_back({id, true});
                auto it = index.find(key);
                if (it == index.end()) {
                    GroundProgram::MinimizeElem g;
                    g.weight = weight;
                    g.tuple = key;
                    g.alternatives.push_back(std::move(alt));
                    index.emplace(key, out_.minimize.size());
                    out_.minimize.push_back(std::move(g));
                } else {
                    out_.minimize[it->second].alternatives.push_back(std::move(alt));
                }
            });
        }
    }

    static std::string rule_key(char tag, int head, const std::vector<int>& pos,
                                const std::vector<int>& neg) {
        std::string key(1, tag);
        key += std::to_string(head);
        key += ':';
        for (int id : pos) {
            key += std::to_string(id);
            key += ',';
        }
        key += '~';
        for (int id : neg) {
            key += std::to_string(id);
            key += ',';
        }
        return key;
    }

    /// Drops atoms that survived saturation but appear in no emitted rule
    /// (e.g. heads of rules simplified away), renumbering the table.
    void compact() {
        std::vector<char> used(out_.table.size(), 0);
        auto mark = [&](int id) { used[id] = 1; };
        for (int id : out_.facts) mark(id);
        for (int id : out_.choice_atoms) mark(id);
        for (const auto& r : out_.defines) {
            mark(r.head);
            for (int id : r.pos) mark(id);
            for (int id : r.neg) mark(id);
        }
        for (const auto& c : out_.constraints) {
            for (int id : c.pos) mark(id);
            for (int id : c.neg) mark(id);
            for (const auto& agg : c.aggregates)
                for (const auto& e : agg.elements) {
                    mark(e.atom);
                    for (const auto& l : e.cond) mark(l.atom);
                }
        }
        for (const auto& m : out_.minimize)
            for (const auto& alt : m.alternatives)
                for (const auto& l : alt) mark(l.atom);

        std::vector<int> remap(out_.table.size(), -1);
        AtomTable table;
        for (int i = 0; i < out_.table.size(); ++i)
            if (used[i]) remap[i] = table.intern(out_.table.atoms[i]);
        auto fix = [&](int& id) { id = remap[id]; };
        for (int& id : out_.facts) fix(id);
        for (int& id : out_.choice_atoms) fix(id);
        for (auto& r : out_.defines) {
            fix(r.head);
            for (int& id : r.pos) fix(id);
            for (int& id : r.neg) fix(id);
        }
        for (auto& c : out_.constraints) {
            for (int& id : c.pos) fix(id);
            for (int& id : c.neg) fix(id);
            for (auto& agg : c.aggregates)
                for (auto& e : agg.elements) {
                    fix(e.atom);
                    for (auto& l : e.cond) fix(l.atom);
                }
        }
        for (auto& m : out_.minimize)
            for (auto& alt : m.alternatives)
                for (auto& l : alt) fix(l.atom);
        out_.table = std::move(table);
    }

    void attach_strata() {
        Stratification s = stratify(program_);
        int ordinal = 0;
        for (const auto& st : s.strata) {
            if (st.kind != Stratum::Kind::Defines) continue;
            for (const auto& pred : st.predicates) out_.define_stratum[pred] = ordinal;
            ++ordinal;
        }
        out_.define_strata_count = ordinal;
    }
};

inline GroundProgram ground(const Program& p) { return Grounder(p).run(); }

/// Rebuilds a syntax-level program from a ground one (for the oracle and
/// the translate pipeline).
inline Program ground_to_program(const GroundProgram& g) {
    Program out;
    auto declare = [&](int id) {
        const Atom& a = g.table.atoms[id];
        out.signature.declare(a.predicate, a.arity(), 0);
        return a;
    };
    for (int id : g.facts) out.rules.push_back(fact(declare(id)));
    for (int id : g.choice_atoms) out.rules.push_back(choice({declare(id)}));
    for (const auto& r : g.defines) {
        std::vector<BodyPart> body;
        for (int id : r.pos) body.push_back(pos(declare(id)));
        for (int id : r.neg) body.push_back(neg(declare(id)));
        out.rules.push_back(rule(declare(r.head), std::move(body), r.line));
    }
    for (const auto& c : g.constraints) {
        std::vector<BodyPart> body;
        for (int id : c.pos) body.push_back(pos(declare(id)));
        for (int id : c.neg) body.push_back(neg(declare(id)));
        for (const auto& agg : c.aggregates) {
            Aggregate a;
            a.negated = agg.negated;
            if (agg.left) a.left = AggregateBound{agg.left->first, Term::number(agg.left->second)};
            if (agg.right)
                a.right = AggregateBound{agg.right->first, Term::number(agg.right->second)};
            for (const auto& e : agg.elements) {
                if (!e.cond.empty())
                    throw std::runtime_error(
                        "cannot rebuild aggregate elements with residual conditions");
                a.elements.push_back(ChoiceElement{declare(e.atom), {}});
            }
            body.push_back(std::move(a));
        }
        out.rules.push_back(constraint(std::move(body), c.line));
    }
    return out;
}

}  // namespace austere
