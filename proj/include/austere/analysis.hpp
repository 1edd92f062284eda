#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "austere/print.hpp"
#include "austere/syntax.hpp"

namespace austere {

// Node name for the pseudo-predicate defined by integrity constraints.
inline constexpr const char* kConstraintNode = "#false";

// ---------------------------------------------------------------------------
// Predicate dependency graph

struct DependencyGraph {
    struct Edge {
        bool positive = false;
        bool negative = false;
        std::vector<int> witnesses;  // rule indices
    };

    std::set<std::string> nodes;
    std::map<std::pair<std::string, std::string>, Edge> edges;  // (from, to)

    bool has_edge(const std::string& from, const std::string& to) const {
        return edges.count({from, to}) != 0;
    }

    std::set<std::string> direct_dependencies(const std::string& p) const {
        std::set<std::string> out;
        for (const auto& [key, edge] : edges)
            if (key.first == p) out.insert(key.second);
        return out;
    }

    /// Transitive "depends" relation: p depends on q when q is reachable
    /// from p over dependency edges.
    bool depends(const std::string& p, const std::string& q) const {
        std::set<std::string> seen;
        std::vector<std::string> todo{p};
        while (!todo.empty()) {
            std::string cur = todo.back();
            todo.pop_back();
            for (const auto& d : direct_dependencies(cur)) {
                if (d == q) return true;
                if (seen.insert(d).second) todo.push_back(d);
            }
        }
        return false;
    }
};

namespace detail {

inline void add_edge(DependencyGraph& g, const std::string& from, const std::string& to,
                     bool negative, int rule_index) {
    g.nodes.insert(from);
    g.nodes.insert(to);
    auto& e = g.edges[{from, to}];
    (negative ? e.negative : e.positive) = true;
    if (e.witnesses.empty() || e.witnesses.back() != rule_index)
        e.witnesses.push_back(rule_index);
}

inline void add_body_edges(DependencyGraph& g, const std::string& head,
                           const std::vector<BodyPart>& body, int rule_index) {
    for (const auto& part : body) {
        if (const auto* lit = std::get_if<Literal>(&part)) {
            add_edge(g, head, lit->atom.predicate, lit->negative, rule_index);
        } else if (const auto* agg = std::get_if<Aggregate>(&part)) {
            // Aggregates hide a guard complement, so every predicate inside
            // contributes both polarities.
            for (const auto& e : agg->elements) {
                add_edge(g, head, e.atom.predicate, false, rule_index);
                add_edge(g, head, e.atom.predicate, true, rule_index);
                for (const auto& c : e.condition)
                    if (const auto* cl = std::get_if<Literal>(&c)) {
                        add_edge(g, head, cl->atom.predicate, false, rule_index);
                        add_edge(g, head, cl->atom.predicate, true, rule_index);
                    }
            }
        }
    }
}

inline void add_condition_edges(DependencyGraph& g, const std::string& head,
                                const std::vector<CondLit>& cond, int rule_index) {
    for (const auto& c : cond)
        if (const auto* lit = std::get_if<Literal>(&c))
            add_edge(g, head, lit->atom.predicate, lit->negative, rule_index);
}

}  // namespace detail

/// Predicate-level dependency graph; integrity constraints appear as rules
/// defining the pseudo-predicate #false.
inline DependencyGraph dependency_graph(const Program& p) {
    DependencyGraph g;
    for (int i = 0; i < static_cast<int>(p.rules.size()); ++i) {
        const Rule& r = p.rules[i];
        if (const Atom* head = r.head_atom()) {
            g.nodes.insert(head->predicate);
            detail::add_body_edges(g, head->predicate, r.body, i);
        } else if (const auto* c = std::get_if<ChoiceHead>(&r.head)) {
            for (const auto& e : c->elements) {
                g.nodes.insert(e.atom.predicate);
                detail::add_body_edges(g, e.atom.predicate, r.body, i);
                detail::add_condition_edges(g, e.atom.predicate, e.condition, i);
            }
        } else {
            g.nodes.insert(kConstraintNode);
            detail::add_body_edges(g, kConstraintNode, r.body, i);
        }
    }
    return g;
}

/// def(p): indices of the rules with p on their left-hand side; pass
/// #false for the integrity constraints.
inline std::vector<int> definition_indices(const Program& p, const std::string& pred) {
    if (pred != kConstraintNode && !p.signature.contains(pred))
        throw std::runtime_error("unknown predicate '" + pred + "'");
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(p.rules.size()); ++i) {
        const Rule& r = p.rules[i];
        if (const Atom* head = r.head_atom()) {
            if (head->predicate == pred) out.push_back(i);
        } else if (const auto* c = std::get_if<ChoiceHead>(&r.head)) {
            for (const auto& e : c->elements)
                if (e.atom.predicate == pred) {
                    out.push_back(i);
                    break;
                }
        } else if (pred == kConstraintNode) {
            out.push_back(i);
        }
    }
    return out;
}

inline std::vector<Rule> definitions(const Program& p, const std::string& pred) {
    std::vector<Rule> out;
    for (int i : definition_indices(p, pred)) out.push_back(p.rules[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Stratification

struct Stratum {
    enum class Kind { Facts, Choices, Defines, Guards, Checks };
    Kind kind = Kind::Defines;
    std::vector<int> rules;              // ascending indices into Program::rules
    std::set<int> lines;
    std::set<std::string> predicates;    // head predicates (empty for constraints)
    int level = 0;                       // dependency depth among define strata
};

inline const char* to_string(Stratum::Kind k) {
    switch (k) {
        case Stratum::Kind::Facts: return "facts";
        case Stratum::Kind::Choices: return "choices";
        case Stratum::Kind::Defines: return "defines";
        case Stratum::Kind::Guards: return "guards";
        case Stratum::Kind::Checks: return "checks";
    }
    return "?";
}

struct Stratification {
    std::vector<Stratum> strata;
    std::map<std::string, int> predicate_stratum;  // predicate -> index into strata
    std::vector<Diagnostic> diagnostics;           // easy-shape violations and style notes
    bool has_choices = false;

    const Stratum* facts() const { return find(Stratum::Kind::Facts); }
    const Stratum* choices() const { return find(Stratum::Kind::Choices); }

    std::vector<const Stratum*> defines() const {
        std::vector<const Stratum*> out;
        for (const auto& s : strata)
            if (s.kind == Stratum::Kind::Defines) out.push_back(&s);
        return out;
    }

    std::vector<const Stratum*> constraints() const {
        std::vector<const Stratum*> out;
        for (const auto& s : strata)
            if (s.kind == Stratum::Kind::Guards || s.kind == Stratum::Kind::Checks)
                out.push_back(&s);
        return out;
    }

private:
    const Stratum* find(Stratum::Kind k) const {
        for (const auto& s : strata)
            if (s.kind == k) return &s;
        return nullptr;
    }
};

namespace detail {

struct SccResult {
    std::vector<std::vector<std::string>> components;  // in discovery order
    std::map<std::string, int> component_of;
};

/// Tarjan over the restriction of the dependency graph to `preds`.
inline SccResult strongly_connected(const std::set<std::string>& preds,
                                    const DependencyGraph& g) {
    SccResult res;
    std::map<std::string, int> index, low;
    std::vector<std::string> stack;
    std::set<std::string> on_stack;
    int counter = 0;

    struct Frame {
        std::string node;
        std::vector<std::string> succ;
        std::size_t next = 0;
    };

    auto successors = [&](const std::string& n) {
        std::vector<std::string> out;
        for (const auto& d : g.direct_dependencies(n))
            if (preds.count(d)) out.push_back(d);
        return out;
    };

    for (const auto& root : preds) {
        if (index.count(root)) continue;
        std::vector<Frame> frames;
        frames.push_back({root, successors(root), 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack.insert(root);
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next < f.succ.size()) {
                const std::string& w = f.succ[f.next++];
                if (!index.count(w)) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack.insert(w);
                    frames.push_back({w, successors(w), 0});
                } else if (on_stack.count(w)) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
            } else {
                if (low[f.node] == index[f.node]) {
                    std::vector<std::string> comp;
                    while (true) {
                        std::string w = stack.back();
                        stack.pop_back();
                        on_stack.erase(w);
                        comp.push_back(w);
                        if (w == f.node) break;
                    }
                    std::sort(comp.begin(), comp.end());
                    for (const auto& n : comp)
                        res.component_of[n] = static_cast<int>(res.components.size());
                    res.components.push_back(std::move(comp));
                }
                std::string done = f.node;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().node] = std::min(low[frames.back().node], low[done]);
            }
        }
    }
    return res;
}

}  // namespace detail

/// Canonical stratification: facts first, then choices, then normal-rule
/// strata by dependency depth (strongly connected definitions merged, one
/// stratum per depth), and integrity constraints last with the
/// aggregate-bound guards ahead of the plain checks.
inline Stratification stratify(const Program& p) {
    Stratification out;
    DependencyGraph g = dependency_graph(p);

    // Rule classification and per-predicate definition shape.
    std::map<std::string, std::vector<int>> normal_def;  // pred -> normal rule indices
    std::map<std::string, bool> has_fact, has_choice;
    std::vector<int> fact_rules, choice_rules, guard_rules, check_rules;
    for (int i = 0; i < static_cast<int>(p.rules.size()); ++i) {
        const Rule& r = p.rules[i];
        switch (r.kind()) {
            case RuleKind::Fact: {
                fact_rules.push_back(i);
                has_fact[r.head_atom()->predicate] = true;
                break;
            }
            case RuleKind::Choice: {
                choice_rules.push_back(i);
                const auto& c = std::get<ChoiceHead>(r.head);
                for (const auto& e : c.elements) has_choice[e.atom.predicate] = true;
                break;
            }
            case RuleKind::Constraint:
                (p.rules[i].body_has_aggregate() ? guard_rules : check_rules).push_back(i);
                break;
            default:
                normal_def[r.head_atom()->predicate].push_back(i);
                break;
        }
    }
    out.has_choices = !choice_rules.empty();

    // Facts of predicates that are also defined by rules or choices stay
    // with their definition; everything else forms the facts stratum.
    std::vector<int> plain_facts;
    for (int i : fact_rules) {
        const std::string& pred = p.rules[i].head_atom()->predicate;
        if (normal_def.count(pred)) {
            normal_def[pred].push_back(i);
            out.diagnostics.push_back(
                {Diagnostic::Severity::Warning, p.rules[i].line,
                 "fact for derived predicate '" + pred + "' is grouped with its definition"});
        } else if (has_choice.count(pred)) {
            choice_rules.push_back(i);
            out.diagnostics.push_back(
                {Diagnostic::Severity::Warning, p.rules[i].line,
                 "fact for choice predicate '" + pred + "' is grouped with the choices"});
        } else {
            plain_facts.push_back(i);
        }
    }
    std::sort(choice_rules.begin(), choice_rules.end());
    for (auto& [pred, rules] : normal_def) std::sort(rules.begin(), rules.end());

    auto make_stratum = [&](Stratum::Kind kind, std::vector<int> rules, int level = 0) {
        Stratum s;
        s.kind = kind;
        s.level = level;
        std::sort(rules.begin(), rules.end());
        for (int i : rules) {
            s.lines.insert(p.rules[i].line);
            if (const Atom* a = p.rules[i].head_atom()) s.predicates.insert(a->predicate);
            if (const auto* c = std::get_if<ChoiceHead>(&p.rules[i].head))
                for (const auto& e : c->elements) s.predicates.insert(e.atom.predicate);
        }
        s.rules = std::move(rules);
        return s;
    };

    // Facts stratum is always materialized when the program has choices, so
    // the guess-define-check shape stays visible even with an empty instance.
    if (!plain_facts.empty() || out.has_choices)
        out.strata.push_back(make_stratum(Stratum::Kind::Facts, plain_facts));
    if (!choice_rules.empty())
        out.strata.push_back(make_stratum(Stratum::Kind::Choices, choice_rules));

    // Define strata: SCC condensation over the normal-rule predicates,
    // grouped by dependency depth.
    std::set<std::string> d_preds;
    for (const auto& [pred, rules] : normal_def) d_preds.insert(pred);
    detail::SccResult scc = detail::strongly_connected(d_preds, g);

    int ncomp = static_cast<int>(scc.components.size());
    std::vector<std::set<int>> comp_deps(ncomp);
    for (int c = 0; c < ncomp; ++c)
        for (const auto& pred : scc.components[c])
            for (const auto& dep : g.direct_dependencies(pred))
                if (d_preds.count(dep) && scc.component_of[dep] != c)
                    comp_deps[c].insert(scc.component_of[dep]);

    std::vector<int> comp_level(ncomp, 0);
    bool changed = true;
    while (changed) {  // longest-path levels over the condensation DAG
        changed = false;
        for (int c = 0; c < ncomp; ++c) {
            int lvl = 1;
            for (int d : comp_deps[c]) lvl = std::max(lvl, comp_level[d] + 1);
            if (lvl != comp_level[c]) {
                comp_level[c] = lvl;
                changed = true;
            }
        }
    }

    int max_level = 0;
    for (int c = 0; c < ncomp; ++c) max_level = std::max(max_level, comp_level[c]);
    for (int lvl = 1; lvl <= max_level; ++lvl) {
        std::vector<int> rules;
        for (int c = 0; c < ncomp; ++c) {
            if (comp_level[c] != lvl) continue;
            for (const auto& pred : scc.components[c])
                for (int i : normal_def[pred]) rules.push_back(i);
        }
        if (!rules.empty())
            out.strata.push_back(make_stratum(Stratum::Kind::Defines, std::move(rules), lvl));
    }

    if (!guard_rules.empty())
        out.strata.push_back(make_stratum(Stratum::Kind::Guards, guard_rules));
    if (!check_rules.empty())
        out.strata.push_back(make_stratum(Stratum::Kind::Checks, check_rules));

    for (int s = 0; s < static_cast<int>(out.strata.size()); ++s)
        for (const auto& pred : out.strata[s].predicates) out.predicate_stratum[pred] = s;

    // Easy-shape diagnostics.
    auto stratum_index = [&](const std::string& pred) {
        auto it = out.predicate_stratum.find(pred);
        return it == out.predicate_stratum.end() ? -1 : it->second;
    };
    for (int i : choice_rules) {
        const Rule& r = p.rules[i];
        if (r.kind() != RuleKind::Choice) continue;
        const auto& c = std::get<ChoiceHead>(r.head);
        if (c.bounded())
            out.diagnostics.push_back({Diagnostic::Severity::Warning, r.line,
                                       "aggregate head: eliminate it to obtain a plain choice "
                                       "(see the translate pipeline)"});
        auto check_dep = [&](const std::string& pred) {
            int s = stratum_index(pred);
            if (s >= 0 && out.strata[s].kind != Stratum::Kind::Facts)
                out.diagnostics.push_back(
                    {Diagnostic::Severity::Warning, r.line,
                     "choice rule depends on derived predicate '" + pred + "'"});
        };
        for (const auto& part : r.body)
            if (const auto* lit = std::get_if<Literal>(&part)) check_dep(lit->atom.predicate);
        for (const auto& e : c.elements)
            for (const auto& cond : e.condition)
                if (const auto* lit = std::get_if<Literal>(&cond)) check_dep(lit->atom.predicate);
    }
    for (const auto& [pred, rules] : normal_def) {
        int own = stratum_index(pred);
        for (int i : rules) {
            for (const auto& part : p.rules[i].body) {
                const auto* lit = std::get_if<Literal>(&part);
                if (!lit || !lit->negative) continue;
                int dep = stratum_index(lit->atom.predicate);
                if (dep == own)
                    out.diagnostics.push_back(
                        {Diagnostic::Severity::Warning, p.rules[i].line,
                         "normal stratum depends negatively on itself: 'not " +
                             to_text(lit->atom) + "' is defined in the same stratum"});
            }
        }
    }
    // Methodology style lints: compartment order in the source, one
    // predicate per define stratum, no cycles inside a stratum.
    int last_nonconstraint_line = 0;
    for (const auto& r : p.rules)
        if (!r.is_constraint()) last_nonconstraint_line = std::max(last_nonconstraint_line, r.line);
    for (int i : guard_rules)
        if (p.rules[i].line < last_nonconstraint_line) {
            out.diagnostics.push_back({Diagnostic::Severity::Note, p.rules[i].line,
                                       "integrity constraint appears before later rules; "
                                       "constraints conventionally come last"});
            break;
        }
    for (int i : check_rules)
        if (p.rules[i].line < last_nonconstraint_line) {
            out.diagnostics.push_back({Diagnostic::Severity::Note, p.rules[i].line,
                                       "integrity constraint appears before later rules; "
                                       "constraints conventionally come last"});
            break;
        }
    for (const auto& s : out.strata) {
        if (s.kind != Stratum::Kind::Defines) continue;
        if (s.predicates.size() > 1)
            out.diagnostics.push_back(
                {Diagnostic::Severity::Note, *s.lines.begin(),
                 "stratum defines " + std::to_string(s.predicates.size()) +
                     " predicates; consider one predicate per stratum"});
        for (const auto& a : s.predicates)
            for (const auto& b : s.predicates)
                if (a < b && g.depends(a, b) && g.depends(b, a))
                    out.diagnostics.push_back({Diagnostic::Severity::Note, *s.lines.begin(),
                                               "predicates '" + a + "' and '" + b +
                                                   "' are mutually recursive"});
    }
    return out;
}

/// Renders a stratification as the tuple of line sets, e.g.
/// ({1,2,3},{5},{6,7},{8,9,10}). An empty facts part shows as ∅.
inline std::string render_stratification(const Stratification& s) {
    std::string out = "(";
    bool first = true;
    for (const auto& st : s.strata) {
        if (!first) out += ",";
        first = false;
        if (st.rules.empty()) {
            out += "∅";
            continue;
        }
        out += "{";
        bool f2 = true;
        for (int line : st.lines) {
            if (!f2) out += ",";
            f2 = false;
            out += std::to_string(line);
        }
        out += "}";
    }
    out += ")";
    return out;
}

// ---------------------------------------------------------------------------
// Classification

struct EasyDecomposition {
    Stratification strat;
    std::vector<Diagnostic> violations;

    bool easy() const { return violations.empty(); }
};

/// Checks the guess-define-check shape (F,C,D1,...,Dn,I). Violations name
/// the offending rules; the decomposition itself is always produced.
inline EasyDecomposition classify_easy(const Program& p) {
    EasyDecomposition out;
    out.strat = stratify(p);
    for (const auto& d : out.strat.diagnostics)
        if (d.severity == Diagnostic::Severity::Warning) out.violations.push_back(d);
    return out;
}

struct CheckResult {
    bool ok = true;
    std::vector<Diagnostic> diagnostics;
};

/// Stratified negation: every negatively occurring predicate is defined in
/// a strictly lower stratum (constraints sit last and are exempt).
inline CheckResult check_stratified_negation(const Program& p) {
    CheckResult out;
    Stratification s = stratify(p);
    for (int i = 0; i < static_cast<int>(p.rules.size()); ++i) {
        const Rule& r = p.rules[i];
        if (r.is_constraint()) continue;
        int own = -1;
        if (const Atom* head = r.head_atom()) {
            auto it = s.predicate_stratum.find(head->predicate);
            own = it == s.predicate_stratum.end() ? -1 : it->second;
        } else {
            continue;  // choices have no negative body literals in scope here
        }
        for (const auto& part : r.body) {
            const auto* lit = std::get_if<Literal>(&part);
            if (!lit || !lit->negative) continue;
            auto it = s.predicate_stratum.find(lit->atom.predicate);
            if (it == s.predicate_stratum.end()) continue;  // undefined, vacuously below
            if (it->second >= own) {
                out.ok = false;
                out.diagnostics.push_back(
                    {Diagnostic::Severity::Error, r.line,
                     "negative literal 'not " + to_text(lit->atom) +
                         "' refers to a predicate not defined strictly below"});
            }
        }
    }
    return out;
}

/// Austere shape: facts, bodiless choices, definite rules and integrity
/// constraints only.
inline CheckResult check_austere(const Program& p) {
    CheckResult out;
    for (const auto& r : p.rules) {
        switch (r.kind()) {
            case RuleKind::Fact:
            case RuleKind::Constraint: break;
            case RuleKind::Choice: {
                const auto& c = std::get<ChoiceHead>(r.head);
                bool plain = !c.bounded() && r.body.empty();
                for (const auto& e : c.elements)
                    if (!e.condition.empty()) plain = false;
                if (!plain) {
                    out.ok = false;
                    out.diagnostics.push_back({Diagnostic::Severity::Error, r.line,
                                               "choice rule is not bodiless (ground the program "
                                               "or eliminate bounds first)"});
                }
                break;
            }
            case RuleKind::Definite: break;
            case RuleKind::Normal:
                out.ok = false;
                out.diagnostics.push_back({Diagnostic::Severity::Error, r.line,
                                           "normal rule with negation is not definite"});
                break;
        }
    }
    return out;
}

}  // namespace austere
