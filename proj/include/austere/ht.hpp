#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "austere/formula.hpp"
#include "austere/print.hpp"
#include "austere/syntax.hpp"

namespace austere {

class bound_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class vocabulary_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultHtBound = 20;
inline constexpr int kDefaultClassicalBound = 24;

using Mask = std::uint64_t;

/// Sorted atom universe; bit i of a Mask stands for names[i].
struct Vocabulary {
    std::vector<std::string> names;

    static Vocabulary of(const std::set<std::string>& atoms) {
        Vocabulary v;
        v.names.assign(atoms.begin(), atoms.end());
        return v;
    }

    int size() const { return static_cast<int>(names.size()); }

    int index(const std::string& name) const {
        auto it = std::lower_bound(names.begin(), names.end(), name);
        if (it == names.end() || *it != name) return -1;
        return static_cast<int>(it - names.begin());
    }

    Mask mask_of(const std::set<std::string>& atoms) const {
        Mask m = 0;
        for (const auto& a : atoms) {
            int i = index(a);
            if (i < 0) throw vocabulary_error("atom '" + a + "' not in vocabulary");
            m |= Mask(1) << i;
        }
        return m;
    }

    std::set<std::string> set_of(Mask m) const {
        std::set<std::string> out;
        for (int i = 0; i < size(); ++i)
            if (m >> i & 1) out.insert(names[i]);
        return out;
    }
};

/// `a` before `b` when a's atom set is smaller, or lexicographically
/// earlier over the name-sorted vocabulary at equal size.
inline bool mask_less(Mask a, Mask b) {
    int pa = __builtin_popcountll(a), pb = __builtin_popcountll(b);
    if (pa != pb) return pa < pb;
    if (a == b) return false;
    Mask diff = a ^ b;
    Mask low = diff & -diff;
    return (a & low) != 0;  // the earlier differing atom belongs to a
}

/// Formula flattened into postorder ops for fast repeated HT evaluation.
/// eval() returns the pair (here, there): ⟨H,T⟩ ⊨ φ and T ⊨ φ. The
/// implication clause checks both worlds, so `here` for φ→ψ is
/// there(φ→ψ) ∧ (¬here(φ) ∨ here(ψ)).
class CompiledFormula {
public:
    CompiledFormula() = default;

    CompiledFormula(const Formula& f, const Vocabulary& vocab) { root_ = compile(f, vocab); }

    struct Eval {
        bool here, there;
    };

    Eval eval(Mask here, Mask there) const {
        scratch_.resize(ops_.size());
        for (std::size_t i = 0; i < ops_.size(); ++i) {
            const Op& op = ops_[i];
            Eval r{};
            switch (op.kind) {
                case Formula::Kind::Atom:
                    r.here = (here >> op.bit) & 1;
                    r.there = (there >> op.bit) & 1;
                    break;
                case Formula::Kind::Bottom: break;
                case Formula::Kind::And:
                    r.here = scratch_[op.lhs].here && scratch_[op.rhs].here;
                    r.there = scratch_[op.lhs].there && scratch_[op.rhs].there;
                    break;
                case Formula::Kind::Or:
                    r.here = scratch_[op.lhs].here || scratch_[op.rhs].here;
                    r.there = scratch_[op.lhs].there || scratch_[op.rhs].there;
                    break;
                case Formula::Kind::Implies:
                    r.there = !scratch_[op.lhs].there || scratch_[op.rhs].there;
                    r.here = r.there && (!scratch_[op.lhs].here || scratch_[op.rhs].here);
                    break;
            }
            scratch_[i] = r;
        }
        return scratch_[root_];
    }

private:
    struct Op {
        Formula::Kind kind;
        int bit = -1;
        int lhs = -1, rhs = -1;
    };

    int compile(const Formula& f, const Vocabulary& vocab) {
        Op op;
        op.kind = f.kind();
        switch (f.kind()) {
            case Formula::Kind::Atom: {
                op.bit = vocab.index(f.atom_name());
                if (op.bit < 0)
                    throw vocabulary_error("atom '" + f.atom_name() + "' not in vocabulary");
                break;
            }
            case Formula::Kind::Bottom: break;
            default:
                op.lhs = compile(f.lhs(), vocab);
                op.rhs = compile(f.rhs(), vocab);
        }
        ops_.push_back(op);
        return static_cast<int>(ops_.size()) - 1;
    }

    std::vector<Op> ops_;
    int root_ = -1;
    mutable std::vector<Eval> scratch_;
};

// ---------------------------------------------------------------------------
// Interpretations and model sets

/// HT interpretation ⟨H,T⟩ over an explicit vocabulary, with H ⊆ T ⊆ At
/// enforced at construction.
struct HTInterpretation {
    std::set<std::string> vocabulary;
    std::set<std::string> here;
    std::set<std::string> there;

    HTInterpretation(std::set<std::string> vocab, std::set<std::string> h, std::set<std::string> t)
        : vocabulary(std::move(vocab)), here(std::move(h)), there(std::move(t)) {
        if (!std::includes(there.begin(), there.end(), here.begin(), here.end()))
            throw std::invalid_argument("HT interpretation requires H ⊆ T");
        if (!std::includes(vocabulary.begin(), vocabulary.end(), there.begin(), there.end()))
            throw std::invalid_argument("HT interpretation requires T ⊆ At");
    }

    bool total() const { return here == there; }
};

struct HTModelSet {
    Vocabulary vocab;
    std::vector<std::pair<Mask, Mask>> models;  // (here, there)

    std::size_t size() const { return models.size(); }
    bool contains(const std::set<std::string>& h, const std::set<std::string>& t) const {
        return std::find(models.begin(), models.end(),
                         std::make_pair(vocab.mask_of(h), vocab.mask_of(t))) != models.end();
    }
};

struct ModelSet {
    Vocabulary vocab;
    std::vector<Mask> models;  // sorted by mask_less, unique

    std::size_t size() const { return models.size(); }

    bool contains(const std::set<std::string>& atoms) const {
        return std::find(models.begin(), models.end(), vocab.mask_of(atoms)) != models.end();
    }

    std::vector<std::set<std::string>> to_sets() const {
        std::vector<std::set<std::string>> out;
        out.reserve(models.size());
        for (Mask m : models) out.push_back(vocab.set_of(m));
        return out;
    }

    void canonicalize() {
        std::sort(models.begin(), models.end(), mask_less);
        models.erase(std::unique(models.begin(), models.end()), models.end());
    }

    friend bool operator==(const ModelSet& a, const ModelSet& b) {
        if (a.vocab.names == b.vocab.names) return a.models == b.models;
        auto sa = a.to_sets();
        auto sb = b.to_sets();
        return std::set<std::set<std::string>>(sa.begin(), sa.end()) ==
               std::set<std::set<std::string>>(sb.begin(), sb.end());
    }
};

namespace detail {

inline void check_bound(const Vocabulary& vocab, int max_atoms, const char* what) {
    if (vocab.size() > max_atoms)
        throw bound_error(std::string(what) + ": vocabulary of " + std::to_string(vocab.size()) +
                          " atoms exceeds bound " + std::to_string(max_atoms));
}

inline Vocabulary theory_vocab(const std::vector<Formula>& gamma,
                               const std::set<std::string>& vocab) {
    std::set<std::string> names = vocab;
    for (const auto& f : gamma)
        for (const auto& a : f.atoms()) names.insert(a);
    return Vocabulary::of(names);
}

inline std::vector<CompiledFormula> compile_all(const std::vector<Formula>& gamma,
                                                const Vocabulary& vocab) {
    std::vector<CompiledFormula> out;
    out.reserve(gamma.size());
    for (const auto& f : gamma) out.emplace_back(f, vocab);
    return out;
}

inline bool all_here(const std::vector<CompiledFormula>& fs, Mask h, Mask t) {
    for (const auto& f : fs)
        if (!f.eval(h, t).here) return false;
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Core satisfaction

inline bool ht_satisfies(const HTInterpretation& i, const Formula& phi) {
    for (const auto& a : phi.atoms())
        if (!i.vocabulary.count(a))
            throw vocabulary_error("atom '" + a + "' not in interpretation vocabulary");
    Vocabulary v = Vocabulary::of(i.vocabulary);
    CompiledFormula cf(phi, v);
    return cf.eval(v.mask_of(i.here), v.mask_of(i.there)).here;
}

inline bool classical_satisfies(const std::set<std::string>& t, const Formula& phi) {
    std::set<std::string> vocab = t;
    for (const auto& a : phi.atoms()) vocab.insert(a);
    Vocabulary v = Vocabulary::of(vocab);
    CompiledFormula cf(phi, v);
    Mask m = v.mask_of(t);
    return cf.eval(m, m).there;
}

// ---------------------------------------------------------------------------
// Enumeration

/// All HT models ⟨H,T⟩ of the theory over the given vocabulary, ordered by
/// T (size, then lexicographically), then by H likewise.
inline HTModelSet enumerate_ht_models(const std::vector<Formula>& gamma,
                                      const std::set<std::string>& vocab,
                                      int max_atoms = kDefaultHtBound) {
    Vocabulary v = detail::theory_vocab(gamma, vocab);
    detail::check_bound(v, max_atoms, "enumerate_ht_models");
    auto fs = detail::compile_all(gamma, v);
    std::vector<Mask> totals;
    for (Mask t = 0; t < (Mask(1) << v.size()); ++t) totals.push_back(t);
    std::sort(totals.begin(), totals.end(), mask_less);

    HTModelSet out;
    out.vocab = v;
    for (Mask t : totals) {
        std::vector<Mask> heres;
        Mask h = t;
        while (true) {  // all submasks of t, including t and 0
            heres.push_back(h);
            if (h == 0) break;
            h = (h - 1) & t;
        }
        std::sort(heres.begin(), heres.end(), mask_less);
        for (Mask hh : heres)
            if (detail::all_here(fs, hh, t)) out.models.emplace_back(hh, t);
    }
    return out;
}

/// Equilibrium (stable) models of a theory: total models ⟨T,T⟩ admitting no
/// model ⟨H,T⟩ with H ⊂ T. The brute-force stable-model oracle.
inline ModelSet equilibrium_models(const std::vector<Formula>& gamma,
                                   const std::set<std::string>& vocab,
                                   int max_atoms = kDefaultHtBound) {
    Vocabulary v = detail::theory_vocab(gamma, vocab);
    detail::check_bound(v, max_atoms, "equilibrium_models");
    auto fs = detail::compile_all(gamma, v);
    ModelSet out;
    out.vocab = v;
    for (Mask t = 0; t < (Mask(1) << v.size()); ++t) {
        if (!detail::all_here(fs, t, t)) continue;
        bool minimal = true;
        for (Mask h = (t - 1) & t; minimal; h = (h - 1) & t) {
            if (h != t && detail::all_here(fs, h, t)) minimal = false;
            if (h == 0) break;
        }
        if (minimal) out.models.push_back(t);
    }
    out.canonicalize();
    return out;
}

// ---------------------------------------------------------------------------
// Programs as theories

namespace detail {

inline long long eval_ground_term_or_throw(const Term& t) {
    if (t.kind() == Term::Kind::Number) return t.number();
    if (t.kind() == Term::Kind::Arith) {
        long long l = eval_ground_term_or_throw(t.args()[0]);
        long long r = eval_ground_term_or_throw(t.args()[1]);
        switch (t.op()) {
            case ArithOp::Add: return l + r;
            case ArithOp::Sub: return l - r;
            case ArithOp::Mul: return l * r;
            case ArithOp::Div:
                if (r == 0) throw std::runtime_error("division by zero");
                return l / r;
        }
    }
    throw std::runtime_error("expected integer term, got '" + to_text(t) + "'");
}

inline bool rel_holds(long long a, RelOp op, long long b) {
    switch (op) {
        case RelOp::Eq: return a == b;
        case RelOp::Ne: return a != b;
        case RelOp::Lt: return a < b;
        case RelOp::Le: return a <= b;
        case RelOp::Gt: return a > b;
        case RelOp::Ge: return a >= b;
    }
    return false;
}

/// Classical truth of an aggregate against a total model given as a set of
/// atom names. Counts distinct satisfied element atoms.
inline bool aggregate_holds(const Aggregate& agg, const std::set<std::string>& total) {
    std::set<std::string> satisfied;
    for (const auto& e : agg.elements) {
        if (!e.condition.empty())
            throw std::runtime_error("oracle expects ground aggregates without conditions");
        if (total.count(to_text(e.atom))) satisfied.insert(to_text(e.atom));
    }
    long long n = static_cast<long long>(satisfied.size());
    bool ok = true;
    if (agg.left) ok = ok && rel_holds(eval_ground_term_or_throw(agg.left->bound), agg.left->op, n);
    if (agg.right)
        ok = ok && rel_holds(n, agg.right->op, eval_ground_term_or_throw(agg.right->bound));
    return agg.negated ? !ok : ok;
}

struct TheoryOfProgram {
    std::vector<Formula> formulas;            // facts, rules, choices
    std::vector<const Rule*> constraints;     // checked classically on T
    std::set<std::string> atoms;
};

inline Formula body_formula(const Rule& r) {
    Formula body = Formula::top();
    bool first = true;
    for (const auto& part : r.body) {
        Formula f;
        if (const auto* lit = std::get_if<Literal>(&part)) {
            Formula a = Formula::atom(to_text(lit->atom));
            f = lit->negative ? Formula::neg(a) : a;
        } else if (const auto* cmp = std::get_if<Comparison>(&part)) {
            bool holds = rel_holds(eval_ground_term_or_throw(cmp->lhs), cmp->op,
                                   eval_ground_term_or_throw(cmp->rhs));
            f = holds ? Formula::top() : Formula::bottom();
        } else {
            throw std::runtime_error("aggregates are only supported in integrity constraints");
        }
        body = first ? f : Formula::conj(body, f);
        first = false;
    }
    return body;
}

inline TheoryOfProgram theory_of(const Program& p) {
    TheoryOfProgram out;
    auto note_atoms = [&](const Atom& a) { out.atoms.insert(to_text(a)); };
    for (const auto& r : p.rules) {
        if (const Atom* head = r.head_atom()) {
            if (!head->is_ground()) throw std::runtime_error("oracle expects a ground program");
            note_atoms(*head);
            for (const auto& part : r.body)
                if (const auto* lit = std::get_if<Literal>(&part)) note_atoms(lit->atom);
            Formula h = Formula::atom(to_text(*head));
            out.formulas.push_back(r.body.empty() ? h
                                                  : Formula::implies(body_formula(r), h));
        } else if (const auto* c = std::get_if<ChoiceHead>(&r.head)) {
            if (c->bounded())
                throw std::runtime_error(
                    "oracle expects bounded choices to be eliminated first");
            for (const auto& e : c->elements) {
                if (!e.atom.is_ground() || !e.condition.empty())
                    throw std::runtime_error("oracle expects a ground program");
                note_atoms(e.atom);
                Formula a = Formula::atom(to_text(e.atom));
                Formula em = Formula::disj(a, Formula::neg(a));
                out.formulas.push_back(r.body.empty()
                                           ? em
                                           : Formula::implies(body_formula(r), em));
            }
            for (const auto& part : r.body)
                if (const auto* lit = std::get_if<Literal>(&part)) note_atoms(lit->atom);
        } else {
            for (const auto& part : r.body) {
                if (const auto* lit = std::get_if<Literal>(&part)) note_atoms(lit->atom);
                else if (const auto* agg = std::get_if<Aggregate>(&part))
                    for (const auto& e : agg->elements) note_atoms(e.atom);
            }
            out.constraints.push_back(&r);
        }
    }
    return out;
}

/// A constraint never distinguishes here from there (its body sits under a
/// negation), so it is checked classically on T only.
inline bool constraint_holds(const Rule& r, const std::set<std::string>& total) {
    for (const auto& part : r.body) {
        bool part_true;
        if (const auto* lit = std::get_if<Literal>(&part)) {
            bool member = total.count(to_text(lit->atom)) != 0;
            part_true = lit->negative ? !member : member;
        } else if (const auto* cmp = std::get_if<Comparison>(&part)) {
            part_true = rel_holds(eval_ground_term_or_throw(cmp->lhs), cmp->op,
                                  eval_ground_term_or_throw(cmp->rhs));
        } else {
            part_true = aggregate_holds(std::get<Aggregate>(part), total);
        }
        if (!part_true) return true;  // body false, constraint satisfied
    }
    return false;  // body true, constraint violated
}

}  // namespace detail

/// Stable models of a ground program by brute force over all total
/// interpretations with an explicit H ⊂ T minimality check.
inline ModelSet equilibrium_models(const Program& p, int max_atoms = kDefaultHtBound,
                                   const std::set<std::string>& extra_vocab = {}) {
    detail::TheoryOfProgram theory = detail::theory_of(p);
    std::set<std::string> names = theory.atoms;
    names.insert(extra_vocab.begin(), extra_vocab.end());
    Vocabulary v = Vocabulary::of(names);
    detail::check_bound(v, max_atoms, "equilibrium_models");
    auto fs = detail::compile_all(theory.formulas, v);

    ModelSet out;
    out.vocab = v;
    for (Mask t = 0; t < (Mask(1) << v.size()); ++t) {
        if (!detail::all_here(fs, t, t)) continue;
        std::set<std::string> total = v.set_of(t);
        bool ok = true;
        for (const Rule* c : theory.constraints)
            if (!detail::constraint_holds(*c, total)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        bool minimal = true;
        if (t != 0) {
            for (Mask h = (t - 1) & t; minimal; h = (h - 1) & t) {
                if (detail::all_here(fs, h, t)) minimal = false;
                if (h == 0) break;
            }
        }
        if (minimal) out.models.push_back(t);
    }
    out.canonicalize();
    return out;
}

// ---------------------------------------------------------------------------
// Derived checks

inline ModelSet project(const ModelSet& ms, const std::set<std::string>& onto) {
    Vocabulary v = Vocabulary::of(onto);
    ModelSet out;
    out.vocab = v;
    for (Mask m : ms.models) {
        Mask projected = 0;
        for (int i = 0; i < ms.vocab.size(); ++i) {
            if (!(m >> i & 1)) continue;
            int j = v.index(ms.vocab.names[i]);
            if (j >= 0) projected |= Mask(1) << j;
        }
        out.models.push_back(projected);
    }
    out.canonicalize();
    return out;
}

/// Same HT models over the joint vocabulary. Sufficient for strong
/// equivalence of the two theories.
inline bool ht_equivalent(const std::vector<Formula>& gamma1, const std::vector<Formula>& gamma2,
                          const std::set<std::string>& vocab, int max_atoms = kDefaultHtBound) {
    std::set<std::string> names = vocab;
    for (const auto& f : gamma1)
        for (const auto& a : f.atoms()) names.insert(a);
    for (const auto& f : gamma2)
        for (const auto& a : f.atoms()) names.insert(a);
    Vocabulary v = Vocabulary::of(names);
    detail::check_bound(v, max_atoms, "ht_equivalent");
    auto f1 = detail::compile_all(gamma1, v);
    auto f2 = detail::compile_all(gamma2, v);
    for (Mask t = 0; t < (Mask(1) << v.size()); ++t) {
        Mask h = t;
        while (true) {
            if (detail::all_here(f1, h, t) != detail::all_here(f2, h, t)) return false;
            if (h == 0) break;
            h = (h - 1) & t;
        }
    }
    return true;
}

/// True iff every HT model of the premises satisfies the conclusion.
inline bool check_entailment(const std::vector<Formula>& premises, const Formula& conclusion,
                             const std::set<std::string>& vocab,
                             int max_atoms = kDefaultHtBound) {
    std::set<std::string> names = vocab;
    for (const auto& f : premises)
        for (const auto& a : f.atoms()) names.insert(a);
    for (const auto& a : conclusion.atoms()) names.insert(a);
    Vocabulary v = Vocabulary::of(names);
    detail::check_bound(v, max_atoms, "check_entailment");
    auto fs = detail::compile_all(premises, v);
    CompiledFormula goal(conclusion, v);
    for (Mask t = 0; t < (Mask(1) << v.size()); ++t) {
        Mask h = t;
        while (true) {
            if (detail::all_here(fs, h, t) && !goal.eval(h, t).here) return false;
            if (h == 0) break;
            h = (h - 1) & t;
        }
    }
    return true;
}

}  // namespace austere
