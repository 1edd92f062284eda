#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "austere/analysis.hpp"
#include "austere/ground.hpp"
#include "austere/ht.hpp"
#include "austere/transform.hpp"

namespace austere {

struct EngineOptions {
    int max_choices = 24;   // hard cap on |F_C| for candidate enumeration (0 = unlimited)
    int max_models = 0;     // 0 = all
};

/// A stable-model set over named atoms (no vocabulary size limit; the
/// mask-based ModelSet stays with the oracle).
struct SolveResult {
    std::vector<std::vector<std::string>> models;  // each sorted by atom name
    std::optional<long long> cost;                 // set by optimization

    bool satisfiable() const { return !models.empty(); }

    std::set<std::set<std::string>> as_sets() const {
        std::set<std::set<std::string>> out;
        for (const auto& m : models) out.insert(std::set<std::string>(m.begin(), m.end()));
        return out;
    }

    void canonicalize() {
        for (auto& m : models) std::sort(m.begin(), m.end());
        std::sort(models.begin(), models.end(), [](const auto& a, const auto& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a < b;
        });
        models.erase(std::unique(models.begin(), models.end()), models.end());
    }
};

struct ThreeValuedModel {
    std::set<std::string> true_set;
    std::set<std::string> false_set;
    std::set<std::string> unknown_set;

    bool total() const { return unknown_set.empty(); }
};

namespace detail {

inline std::vector<std::string> names_of(const GroundProgram& g, const std::vector<char>& truth) {
    std::vector<std::string> out;
    for (int i = 0; i < g.table.size(); ++i)
        if (truth[i]) out.push_back(g.table.names[i]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

inline bool aggregate_holds(const GroundAggregate& agg, const std::vector<char>& truth) {
    long long count = 0;
    for (const auto& e : agg.elements) {
        if (!truth[e.atom]) continue;
        bool cond = true;
        for (const auto& l : e.cond)
            if (static_cast<bool>(truth[l.atom]) == l.negative) {
                cond = false;
                break;
            }
        if (cond) ++count;
    }
    bool ok = true;
    if (agg.left) ok = ok && detail::rel_holds(agg.left->second, agg.left->first, count);
    if (agg.right) ok = ok && detail::rel_holds(count, agg.right->first, agg.right->second);
    return agg.negated ? !ok : ok;
}

inline bool constraint_satisfied(const GroundProgram::Constraint& c,
                                 const std::vector<char>& truth) {
    for (int id : c.pos)
        if (!truth[id]) return true;
    for (int id : c.neg)
        if (truth[id]) return true;
    for (const auto& agg : c.aggregates)
        if (!aggregate_holds(agg, truth)) return true;
    return false;  // body holds: violated
}

// ---------------------------------------------------------------------------
// T_P and least fixpoints

/// One application of the immediate-consequence operator: heads of rules
/// whose bodies hold in X. Facts are bodiless rules and always fire.
inline std::set<std::string> tp_step(const GroundProgram& g, const std::set<std::string>& x) {
    for (const auto& r : g.defines)
        if (!r.neg.empty())
            throw std::runtime_error("tp_step requires a definite program (negation found)");
    std::set<std::string> out;
    for (int id : g.facts) out.insert(g.table.names[id]);
    for (const auto& r : g.defines) {
        bool holds = true;
        for (int id : r.pos)
            if (!x.count(g.table.names[id])) {
                holds = false;
                break;
            }
        if (holds) out.insert(g.table.names[r.head]);
    }
    return out;
}

namespace detail {

/// Counting-based least fixpoint over the definite rules: linear in the
/// total body size. `base` seeds the computation (facts plus chosen
/// choice atoms).
class DefiniteLfp {
public:
    explicit DefiniteLfp(const GroundProgram& g) : g_(g) {
        watchers_.resize(g.table.size());
        counts_.resize(g.defines.size());
        for (std::size_t r = 0; r < g.defines.size(); ++r) {
            counts_[r] = static_cast<int>(g.defines[r].pos.size());
            for (int id : g.defines[r].pos) watchers_[id].push_back(static_cast<int>(r));
        }
    }

    std::vector<char> compute(const std::vector<int>& base) const {
        std::vector<char> truth(g_.table.size(), 0);
        std::vector<int> counts = counts_;
        std::vector<int> queue;
        auto push = [&](int id) {
            if (!truth[id]) {
                truth[id] = 1;
                queue.push_back(id);
            }
        };
        for (int id : base) push(id);
        for (std::size_t r = 0; r < g_.defines.size(); ++r)
            if (counts[r] == 0 && g_.defines[r].neg.empty()) push(g_.defines[r].head);
        while (!queue.empty()) {
            int id = queue.back();
            queue.pop_back();
            for (int r : watchers_[id]) {
                if (--counts[r] == 0 && g_.defines[r].neg.empty()) push(g_.defines[r].head);
            }
        }
        return truth;
    }

private:
    const GroundProgram& g_;
    std::vector<std::vector<int>> watchers_;
    std::vector<int> counts_;
};

}  // namespace detail

/// Least fixpoint of T over the facts, a set of chosen choice atoms, and
/// the definite rules, from the empty set upward.
inline std::set<std::string> least_fixpoint(const GroundProgram& g,
                                            const std::vector<std::string>& chosen = {}) {
    for (const auto& r : g.defines)
        if (!r.neg.empty())
            throw std::runtime_error("least_fixpoint requires a definite program");
    std::vector<int> base = g.facts;
    for (const auto& name : chosen) {
        int id = g.table.find(name);
        if (id < 0) throw std::runtime_error("unknown atom '" + name + "'");
        base.push_back(id);
    }
    detail::DefiniteLfp lfp(g);
    std::vector<char> truth = lfp.compute(base);
    std::set<std::string> out;
    for (int i = 0; i < g.table.size(); ++i)
        if (truth[i]) out.insert(g.table.names[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Candidate stable models (austere operational semantics)

struct Candidate {
    std::vector<std::string> chosen;  // C' (atom names, id order)
    std::vector<std::string> model;   // lfp of T_{F ∪ C' ∪ D}, sorted
    int multiplicity = 1;             // distinct C' sets yielding this lfp
};

/// Candidates of an austere program: one least fixpoint per C' ⊆ F_C,
/// enumerated by subset size then lexicographically by atom ids;
/// duplicate fixpoints collapse with their multiplicity counted.
inline std::vector<Candidate> candidate_models(const GroundProgram& g,
                                               const EngineOptions& opts = {}) {
    for (const auto& r : g.defines)
        if (!r.neg.empty())
            throw std::runtime_error("candidate_models requires an austere program");
    int k = static_cast<int>(g.choice_atoms.size());
    if (opts.max_choices > 0 && k > opts.max_choices)
        throw bound_error("candidate enumeration over " + std::to_string(k) +
                          " choice atoms exceeds the cap of " + std::to_string(opts.max_choices) +
                          " (raise --max-choices)");
    if (k > 62) throw bound_error("candidate enumeration over more than 62 choice atoms");

    std::vector<std::uint64_t> subsets;
    subsets.reserve(std::size_t(1) << k);
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << k); ++m) subsets.push_back(m);
    std::sort(subsets.begin(), subsets.end(), mask_less);

    detail::DefiniteLfp lfp(g);
    std::vector<Candidate> out;
    std::map<std::vector<std::string>, std::size_t> seen;
    for (std::uint64_t m : subsets) {
        std::vector<int> base = g.facts;
        std::vector<std::string> chosen;
        for (int i = 0; i < k; ++i)
            if (m >> i & 1) {
                base.push_back(g.choice_atoms[i]);
                chosen.push_back(g.table.names[g.choice_atoms[i]]);
            }
        std::vector<char> truth = lfp.compute(base);
        std::vector<std::string> model = detail::names_of(g, truth);
        auto it = seen.find(model);
        if (it != seen.end()) {
            ++out[it->second].multiplicity;
            continue;
        }
        seen.emplace(model, out.size());
        out.push_back(Candidate{std::move(chosen), std::move(model), 1});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stratified and well-founded evaluation

/// Unique stable model of F ∪ C' ∪ D when D has stratified negation:
/// strata are evaluated bottom-up, negative literals referring to the
/// already-final lower strata.
inline std::vector<char> stratified_truth(const GroundProgram& g,
                                          const std::vector<int>& base) {
    // Assign each define rule to the stratum of its head predicate.
    std::vector<std::vector<int>> by_level(g.define_strata_count);
    for (std::size_t r = 0; r < g.defines.size(); ++r) {
        const std::string& pred = g.table.atoms[g.defines[r].head].predicate;
        auto it = g.define_stratum.find(pred);
        if (it == g.define_stratum.end())
            throw std::runtime_error("no stratum for predicate '" + pred + "'");
        by_level[it->second].push_back(static_cast<int>(r));
    }
    auto level_of_atom = [&](int id) {
        auto it = g.define_stratum.find(g.table.atoms[id].predicate);
        return it == g.define_stratum.end() ? -1 : it->second;
    };

    // Validate up front: negative literals may only refer to strictly lower
    // strata (or to base atoms outside the define part).
    for (int level = 0; level < g.define_strata_count; ++level) {
        for (int r : by_level[level]) {
            for (int id : g.defines[r].neg) {
                int dep = level_of_atom(id);
                if (dep != -1 && dep >= level)
                    throw std::runtime_error(
                        "stratification violation: 'not " + g.table.names[id] +
                        "' refers to a predicate not defined strictly below");
            }
        }
    }

    std::vector<char> truth(g.table.size(), 0);
    for (int id : base) truth[id] = 1;
    for (int level = 0; level < g.define_strata_count; ++level) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (int r : by_level[level]) {
                const auto& rule = g.defines[r];
                if (truth[rule.head]) continue;
                bool holds = true;
                for (int id : rule.pos)
                    if (!truth[id]) {
                        holds = false;
                        break;
                    }
                for (int id : rule.neg)
                    if (truth[id]) {
                        holds = false;
                        break;
                    }
                if (holds) {
                    truth[rule.head] = 1;
                    changed = true;
                }
            }
        }
    }
    return truth;
}

inline std::set<std::string> stratified_model(const GroundProgram& g,
                                              const std::vector<std::string>& chosen = {}) {
    std::vector<int> base = g.facts;
    for (const auto& name : chosen) {
        int id = g.table.find(name);
        if (id < 0) throw std::runtime_error("unknown atom '" + name + "'");
        base.push_back(id);
    }
    std::vector<char> truth = stratified_truth(g, base);
    std::set<std::string> out;
    for (int i = 0; i < g.table.size(); ++i)
        if (truth[i]) out.insert(g.table.names[i]);
    return out;
}

namespace detail {

/// lfp of the reduct of the define rules w.r.t. `assumed`: rules whose
/// negative body intersects `assumed` are discarded, remaining negative
/// literals dropped.
inline std::vector<char> reduct_lfp(const GroundProgram& g, const std::vector<int>& base,
                                    const std::vector<char>& assumed) {
    std::vector<char> truth(g.table.size(), 0);
    for (int id : base) truth[id] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : g.defines) {
            if (truth[r.head]) continue;
            bool alive = true;
            for (int id : r.neg)
                if (assumed[id]) {
                    alive = false;
                    break;
                }
            if (!alive) continue;
            bool holds = true;
            for (int id : r.pos)
                if (!truth[id]) {
                    holds = false;
                    break;
                }
            if (holds) {
                truth[r.head] = 1;
                changed = true;
            }
        }
    }
    return truth;
}

}  // namespace detail

/// Well-founded model of the facts + define rules via the alternating
/// fixpoint: K_{i+1} = Γ(U_i), U_{i+1} = Γ(K_{i+1}); true = K,
/// false = complement of U, unknown = U \ K.
inline ThreeValuedModel well_founded_model(const GroundProgram& g,
                                           const std::vector<std::string>& chosen = {}) {
    std::vector<int> base = g.facts;
    for (const auto& name : chosen) {
        int id = g.table.find(name);
        if (id < 0) throw std::runtime_error("unknown atom '" + name + "'");
        base.push_back(id);
    }
    int n = g.table.size();
    std::vector<char> k(n, 0);
    while (true) {
        std::vector<char> u = detail::reduct_lfp(g, base, k);
        std::vector<char> k2 = detail::reduct_lfp(g, base, u);
        if (k2 == k) {
            ThreeValuedModel out;
            for (int i = 0; i < n; ++i) {
                if (k[i]) out.true_set.insert(g.table.names[i]);
                else if (u[i]) out.unknown_set.insert(g.table.names[i]);
                else out.false_set.insert(g.table.names[i]);
            }
            return out;
        }
        k = std::move(k2);
    }
}

// ---------------------------------------------------------------------------
// Stable models

namespace detail {

/// Backtracking enumeration over C' ⊆ F_C for austere programs, with
/// incremental least-fixpoint propagation. Constraints whose bodies are
/// positive literals only are checked as soon as they fire: their bodies
/// grow monotonically with C', so a violation rules out every extension
/// and the subtree is pruned without changing the result set. All other
/// constraints are checked exactly at the leaves.
class AustereSearch {
public:
    AustereSearch(const GroundProgram& g) : g_(g) {
        watchers_.resize(g.table.size());
        counts_.resize(g.defines.size());
        for (std::size_t r = 0; r < g.defines.size(); ++r) {
            counts_[r] = static_cast<int>(g.defines[r].pos.size());
            for (int id : g.defines[r].pos) watchers_[id].push_back(static_cast<int>(r));
        }
        con_watchers_.resize(g.table.size());
        for (std::size_t c = 0; c < g.constraints.size(); ++c) {
            const auto& con = g.constraints[c];
            if (con.neg.empty() && con.aggregates.empty()) {
                monotone_.push_back(static_cast<int>(c));
                con_counts_.push_back(static_cast<int>(con.pos.size()));
                for (int id : con.pos)
                    con_watchers_[id].push_back(static_cast<int>(monotone_.size()) - 1);
            } else {
                deferred_.push_back(static_cast<int>(c));
            }
        }
        truth_.assign(g.table.size(), 0);
    }

    /// Runs the search; calls on_model for each stable model (deduplicated).
    void run(const std::function<void(const std::vector<char>&)>& on_model) {
        violated_ = 0;
        for (std::size_t i = 0; i < monotone_.size(); ++i)
            if (con_counts_[i] == 0) ++violated_;
        for (int id : g_.facts) assign(id);
        for (std::size_t r = 0; r < g_.defines.size(); ++r)
            if (counts_[r] == 0) assign(g_.defines[r].head);
        propagate();
        if (violated_ == 0) dfs(0, on_model);
        // No undo needed at the root; the object is single-use.
    }

private:
    void assign(int id) {
        if (truth_[id]) return;
        truth_[id] = 1;
        trail_.push_back(id);
        queue_.push_back(id);
    }

    void propagate() {
        while (!queue_.empty()) {
            int id = queue_.back();
            queue_.pop_back();
            for (int r : watchers_[id]) {
                if (--counts_[r] == 0) assign(g_.defines[r].head);
                count_trail_.push_back(r);
            }
            for (int w : con_watchers_[id]) {
                if (--con_counts_[w] == 0) ++violated_;
                con_count_trail_.push_back(w);
            }
        }
    }

    struct Mark {
        std::size_t trail, counts, con_counts;
        int violated;
    };

    Mark mark() const {
        return {trail_.size(), count_trail_.size(), con_count_trail_.size(), violated_};
    }

    void undo(const Mark& m) {
        while (trail_.size() > m.trail) {
            truth_[trail_.back()] = 0;
            trail_.pop_back();
        }
        while (count_trail_.size() > m.counts) {
            ++counts_[count_trail_.back()];
            count_trail_.pop_back();
        }
        while (con_count_trail_.size() > m.con_counts) {
            ++con_counts_[con_count_trail_.back()];
            con_count_trail_.pop_back();
        }
        violated_ = m.violated;
        queue_.clear();
    }

    void dfs(std::size_t depth, const std::function<void(const std::vector<char>&)>& on_model) {
        if (depth == g_.choice_atoms.size()) {
            for (int c : deferred_)
                if (!constraint_satisfied(g_.constraints[c], truth_)) return;
            std::vector<char> key = truth_;
            if (seen_.insert(std::move(key)).second) on_model(truth_);
            return;
        }
        int atom = g_.choice_atoms[depth];
        // Branch: include the choice atom.
        Mark m = mark();
        assign(atom);
        propagate();
        if (violated_ == 0) dfs(depth + 1, on_model);
        undo(m);
        // Branch: leave it out.
        dfs(depth + 1, on_model);
    }

    const GroundProgram& g_;
    std::vector<std::vector<int>> watchers_, con_watchers_;
    std::vector<int> counts_, con_counts_;
    std::vector<int> monotone_, deferred_;
    std::vector<char> truth_;
    std::vector<int> trail_, count_trail_, con_count_trail_, queue_;
    int violated_ = 0;
    std::set<std::vector<char>> seen_;
};

}  // namespace detail

/// Stable models of a ground program. Route selection:
///   - austere shape: candidate search with early monotone pruning;
///   - normal defines with stratified negation: per-candidate stratified
///     evaluation;
///   - anything else: normal→austere translation, then the austere route,
///     with the result projected back to the original atoms.
inline SolveResult stable_models(const GroundProgram& g, const EngineOptions& opts = {}) {
    SolveResult out;
    int k = static_cast<int>(g.choice_atoms.size());
    if (opts.max_choices > 0 && k > opts.max_choices)
        throw bound_error("candidate enumeration over " + std::to_string(k) +
                          " choice atoms exceeds the cap of " + std::to_string(opts.max_choices) +
                          " (raise --max-choices)");

    if (g.is_definite()) {
        detail::AustereSearch search(g);
        search.run([&](const std::vector<char>& truth) {
            out.models.push_back(detail::names_of(g, truth));
        });
        out.canonicalize();
        return out;
    }

    // Normal rules present: try the stratified route.
    bool stratified = true;
    try {
        stratified_truth(g, g.facts);
    } catch (const std::runtime_error&) {
        stratified = false;
    }
    if (stratified) {
        if (k > 62) throw bound_error("candidate enumeration over more than 62 choice atoms");
        std::set<std::vector<char>> seen;
        for (std::uint64_t m = 0; m < (std::uint64_t(1) << k); ++m) {
            std::vector<int> base = g.facts;
            for (int i = 0; i < k; ++i)
                if (m >> i & 1) base.push_back(g.choice_atoms[i]);
            std::vector<char> truth = stratified_truth(g, base);
            // A stable model must reproduce its own choices: a chosen atom
            // is in the model by construction, but an unchosen one may have
            // been derived, in which case this C' duplicates another.
            bool ok = true;
            for (std::size_t c = 0; c < g.constraints.size() && ok; ++c)
                ok = constraint_satisfied(g.constraints[c], truth);
            if (!ok) continue;
            if (seen.insert(truth).second) out.models.push_back(detail::names_of(g, truth));
        }
        out.canonicalize();
        return out;
    }

    // General normal program: reduce to an austere one.
    Program source = ground_to_program(g);
    ProgramTranslation tau = translate_program(source);
    GroundProgram tg = ground(tau.program);
    EngineOptions inner = opts;
    SolveResult translated = stable_models(tg, inner);
    std::set<std::vector<std::string>> projected;
    for (const auto& m : translated.models) {
        std::vector<std::string> restricted;
        for (const auto& a : m)
            if (tau.original_atoms.count(a)) restricted.push_back(a);
        projected.insert(std::move(restricted));
    }
    out.models.assign(projected.begin(), projected.end());
    out.canonicalize();
    return out;
}

// ---------------------------------------------------------------------------
// Optimization

inline long long model_cost(const GroundProgram& g, const std::vector<std::string>& model) {
    std::set<std::string> atoms(model.begin(), model.end());
    auto lit_true = [&](const GroundLit& l) {
        bool member = atoms.count(g.table.names[l.atom]) != 0;
        return l.negative ? !member : member;
    };
    long long cost = 0;
    for (const auto& e : g.minimize) {
        bool satisfied = false;
        for (const auto& alt : e.alternatives) {
            bool all = true;
            for (const auto& l : alt)
                if (!lit_true(l)) {
                    all = false;
                    break;
                }
            if (all) {
                satisfied = true;
                break;
            }
        }
        if (satisfied) cost += e.weight;
    }
    return cost;
}

/// Minimal-cost stable models under the #minimize directives (weights
/// summed over distinct satisfied element tuples; ties all returned).
inline SolveResult optimize(const GroundProgram& g, const EngineOptions& opts = {}) {
    SolveResult all = stable_models(g, opts);
    if (!all.satisfiable()) return all;
    if (g.minimize.empty()) {
        all.cost = 0;
        return all;
    }
    SolveResult out;
    long long best = 0;
    bool first = true;
    for (const auto& m : all.models) {
        long long c = model_cost(g, m);
        if (first || c < best) {
            best = c;
            out.models.clear();
            first = false;
        }
        if (c == best) out.models.push_back(m);
    }
    out.cost = best;
    out.canonicalize();
    return out;
}

// ---------------------------------------------------------------------------
// Debugging

struct DebugResult {
    SolveResult result;  // optimal models, including the ic atoms
    struct Violation {
        std::string ic_atom;       // e.g. ic(c8(3))
        int source_line = 0;       // line of the original constraint
        std::string constraint;    // its text
    };
    std::vector<std::vector<Violation>> violations;  // per model
};

/// Applies the debugging rewrite, grounds, and minimizes the number of
/// violated constraint instances.
inline DebugResult debug_solve(const Program& p, const EngineOptions& opts = {}) {
    DebugInfo info;
    Program rewritten = debug_transform(p, &info);
    GroundProgram g = ground(rewritten);
    DebugResult out;
    out.result = optimize(g, opts);
    for (const auto& model : out.result.models) {
        std::vector<DebugResult::Violation> vs;
        for (const auto& atom : model) {
            if (atom.rfind("ic(", 0) != 0) continue;
            DebugResult::Violation v;
            v.ic_atom = atom;
            std::string inner = atom.substr(3);  // up to the matching paren
            std::string label = inner.substr(0, inner.find_first_of("(),"));
            if (const DebugInfo::Entry* e = info.find(label)) {
                v.source_line = e->line;
                v.constraint = to_text(e->original);
            }
            vs.push_back(std::move(v));
        }
        out.violations.push_back(std::move(vs));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Uniqueness of the deterministic extension (methodology advice 3)

struct UniqueExtensionReport {
    int checked = 0;
    bool exhaustive = false;
    struct Sample {
        std::vector<std::string> chosen;
        bool total_wfm = false;
        std::vector<std::string> unknown;            // atoms left undefined
        std::optional<std::size_t> oracle_count;     // SM count when within bounds
    };
    std::vector<Sample> failures;

    bool ok() const { return failures.empty(); }
};

/// Samples C' ⊆ F_C and checks that F ∪ C' ∪ D has a total well-founded
/// model (and, within oracle bounds, exactly one stable model).
/// Constraints are ignored: only the guess-define part is examined.
inline UniqueExtensionReport check_unique_extension(const GroundProgram& g, int sample_count = 64,
                                                    unsigned seed = 0,
                                                    int exhaustive_limit = 12,
                                                    int oracle_atom_bound = kDefaultHtBound) {
    UniqueExtensionReport report;
    int k = static_cast<int>(g.choice_atoms.size());
    std::vector<std::uint64_t> samples;
    if (k <= exhaustive_limit) {
        report.exhaustive = true;
        for (std::uint64_t m = 0; m < (std::uint64_t(1) << k); ++m) samples.push_back(m);
    } else {
        std::mt19937_64 rng(seed);
        std::set<std::uint64_t> seen;
        for (int i = 0; i < sample_count; ++i) {
            std::uint64_t m = rng() & ((k >= 64 ? ~0ull : (1ull << k) - 1));
            if (seen.insert(m).second) samples.push_back(m);
        }
    }

    // Oracle comparison uses the define part only.
    GroundProgram defines_only = g;
    defines_only.constraints.clear();
    defines_only.minimize.clear();
    bool oracle_feasible = g.table.size() <= oracle_atom_bound;

    for (std::uint64_t m : samples) {
        ++report.checked;
        std::vector<std::string> chosen;
        for (int i = 0; i < k; ++i)
            if (m >> i & 1) chosen.push_back(g.table.names[g.choice_atoms[i]]);
        ThreeValuedModel wfm = well_founded_model(g, chosen);
        UniqueExtensionReport::Sample s;
        s.chosen = chosen;
        s.total_wfm = wfm.total();
        s.unknown.assign(wfm.unknown_set.begin(), wfm.unknown_set.end());
        if (oracle_feasible) {
            GroundProgram with_choice = defines_only;
            for (const auto& name : chosen) {
                int id = with_choice.table.find(name);
                with_choice.facts.push_back(id);
            }
            with_choice.choice_atoms.clear();
            std::sort(with_choice.facts.begin(), with_choice.facts.end());
            with_choice.facts.erase(
                std::unique(with_choice.facts.begin(), with_choice.facts.end()),
                with_choice.facts.end());
            Program as_program = ground_to_program(with_choice);
            s.oracle_count = equilibrium_models(as_program, oracle_atom_bound).size();
        }
        bool bad = !s.total_wfm || (s.oracle_count && *s.oracle_count != 1);
        if (bad) report.failures.push_back(std::move(s));
    }
    return report;
}

}  // namespace austere
