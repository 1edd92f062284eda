#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "austere/ht.hpp"
#include "austere/parse.hpp"

using namespace austere;

namespace {

HTInterpretation interp(std::set<std::string> vocab, std::set<std::string> h,
                        std::set<std::string> t) {
    return HTInterpretation(std::move(vocab), std::move(h), std::move(t));
}

Formula F(const char* text) { return parse_formula(text); }

struct FormulaGen {
    std::mt19937 rng;
    std::vector<std::string> atoms;
    FormulaGen(unsigned seed, std::vector<std::string> at) : rng(seed), atoms(std::move(at)) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    Formula gen(int depth) {
        if (depth == 0 || pick(4) == 0) {
            if (pick(8) == 0) return Formula::bottom();
            return Formula::atom(atoms[pick(static_cast<int>(atoms.size()))]);
        }
        switch (pick(4)) {
            case 0: return Formula::conj(gen(depth - 1), gen(depth - 1));
            case 1: return Formula::disj(gen(depth - 1), gen(depth - 1));
            case 2: return Formula::implies(gen(depth - 1), gen(depth - 1));
            default: return Formula::neg(gen(depth - 1));
        }
    }
};

}  // namespace

TEST_CASE("ht satisfaction clauses") {
    std::set<std::string> v{"a"};
    SECTION("atom needs membership in H") {
        CHECK_FALSE(ht_satisfies(interp(v, {}, {"a"}), F("a")));
        CHECK(ht_satisfies(interp(v, {"a"}, {"a"}), F("a")));
    }
    SECTION("double negation collapses to the there world") {
        CHECK(ht_satisfies(interp(v, {}, {"a"}), F("not not a")));
        CHECK_FALSE(ht_satisfies(interp(v, {}, {"a"}), F("a")));
    }
    SECTION("excluded middle holds in total interpretations") {
        CHECK(ht_satisfies(interp(v, {"a"}, {"a"}), F("a | not a")));
        CHECK(ht_satisfies(interp(v, {}, {}), F("a | not a")));
        // ... but not in the middle.
        CHECK_FALSE(ht_satisfies(interp(v, {}, {"a"}), F("a | not a")));
    }
    SECTION("vocabulary mismatch is an error") {
        CHECK_THROWS_AS(ht_satisfies(interp(v, {}, {}), F("b")), vocabulary_error);
    }
    SECTION("H must be included in T") {
        CHECK_THROWS_AS(interp({"a", "b"}, {"a"}, {"b"}), std::invalid_argument);
    }
}

TEST_CASE("classical satisfaction") {
    CHECK_FALSE(classical_satisfies({"a"}, F("not a")));
    CHECK(classical_satisfies({}, F("not a")));
    // Direct evaluation of the running example at T = {b}.
    CHECK(classical_satisfies({"b"}, F("not a -> b | not not (c & not d)")));
}

TEST_CASE("ht model enumeration") {
    SECTION("a single atom formula") {
        HTModelSet ms = enumerate_ht_models({F("a")}, {"a"});
        REQUIRE(ms.size() == 1);
        CHECK(ms.contains({"a"}, {"a"}));
    }
    SECTION("empty theory has all interpretations") {
        HTModelSet ms = enumerate_ht_models({}, {"a"});
        REQUIRE(ms.size() == 3);
        CHECK(ms.contains({}, {}));
        CHECK(ms.contains({}, {"a"}));
        CHECK(ms.contains({"a"}, {"a"}));
    }
    SECTION("negation filters") {
        HTModelSet ms = enumerate_ht_models({F("not a")}, {"a"});
        REQUIRE(ms.size() == 1);
        CHECK(ms.contains({}, {}));
    }
    SECTION("bound is enforced") {
        std::set<std::string> big;
        for (int i = 0; i < 25; ++i) big.insert("x" + std::to_string(i));
        CHECK_THROWS_AS(enumerate_ht_models({}, big), bound_error);
    }
}

TEST_CASE("equilibrium models of theories and programs") {
    SECTION("two stable models from an even negative loop") {
        Program p = parse_program("a :- not b. b :- not a.");
        ModelSet ms = equilibrium_models(p);
        REQUIRE(ms.size() == 2);
        CHECK(ms.contains({"a"}));
        CHECK(ms.contains({"b"}));
    }
    SECTION("odd negative loop has no stable models") {
        Program p = parse_program("a :- not a.");
        CHECK(equilibrium_models(p).size() == 0);
    }
    SECTION("a single fact") {
        Program p = parse_program("a.");
        ModelSet ms = equilibrium_models(p);
        REQUIRE(ms.size() == 1);
        CHECK(ms.contains({"a"}));
    }
    SECTION("three-element odd loop is incoherent") {
        Program p = parse_program("a :- not b. b :- not c. c :- not a.");
        CHECK(equilibrium_models(p).size() == 0);
    }
    SECTION("choice rule doubles the models") {
        Program p = parse_program("{ b }.");
        ModelSet ms = equilibrium_models(p);
        REQUIRE(ms.size() == 2);
        CHECK(ms.contains({}));
        CHECK(ms.contains({"b"}));
    }
    SECTION("constraints filter classically") {
        Program p = parse_program("{ b }. :- not b.");
        ModelSet ms = equilibrium_models(p);
        REQUIRE(ms.size() == 1);
        CHECK(ms.contains({"b"}));
    }
    SECTION("the paper's austere example") {
        Program p = parse_program("a. { b }. c :- b. :- a, not c.");
        ModelSet ms = equilibrium_models(p);
        REQUIRE(ms.size() == 1);
        CHECK(ms.contains({"a", "b", "c"}));
    }
    SECTION("theory form: formulas instead of rules") {
        ModelSet ms = equilibrium_models({F("not a -> b | not not (c & not d)")},
                                         std::set<std::string>{"a", "b", "c", "d"});
        REQUIRE(ms.size() == 1);
        CHECK(ms.contains({"b"}));
    }
}

TEST_CASE("projection") {
    SECTION("drop auxiliary atoms") {
        Program p = parse_program("a :- not b. b :- not a.");
        ModelSet ms = equilibrium_models(p);
        ModelSet onto = project(ms, {"a"});
        REQUIRE(onto.size() == 2);
        CHECK(onto.contains({"a"}));
        CHECK(onto.contains({}));
    }
    SECTION("duplicates collapse") {
        Program p = parse_program("a. { b }.");
        ModelSet ms = equilibrium_models(p);
        REQUIRE(ms.size() == 2);
        ModelSet onto = project(ms, {"a"});
        REQUIRE(onto.size() == 1);
        CHECK(onto.contains({"a"}));
    }
    SECTION("empty set projects to empty") {
        Program p = parse_program("a :- not a.");
        CHECK(project(equilibrium_models(p), {"a"}).size() == 0);
    }
}

TEST_CASE("strong equivalence checking") {
    SECTION("lemma instance: double negation absorbed by excluded middle") {
        // ¬¬(¬a↔b) ∧ (¬b∨b)  vs  (¬a↔b) ∧ (¬b∨b)
        std::vector<Formula> g1{F("not not (not a <-> b) & (not b | b)")};
        std::vector<Formula> g2{F("(not a <-> b) & (not b | b)")};
        CHECK(ht_equivalent(g1, g2, {"a", "b"}));
    }
    SECTION("a and not not a are not strongly equivalent") {
        CHECK_FALSE(ht_equivalent({F("a")}, {F("not not a")}, {"a"}));
    }
    SECTION("reflexivity") {
        Formula f = F("not a -> b | c");
        CHECK(ht_equivalent({f}, {f}, {"a", "b", "c"}));
    }
}

TEST_CASE("entailment") {
    SECTION("(not p1 <-> p2) entails (not p2 | p2)") {
        CHECK(check_entailment({F("not a <-> b")}, F("not b | b"), {"a", "b"}));
    }
    SECTION("reflexive") {
        Formula f = F("a -> b");
        CHECK(check_entailment({f}, f, {"a", "b"}));
    }
    SECTION("atoms do not entail each other") {
        CHECK_FALSE(check_entailment({F("a")}, F("b"), {"a", "b"}));
    }
}

TEST_CASE("persistence property") {
    // ⟨H,T⟩ ⊨ φ implies ⟨T,T⟩ ⊨ φ, over random formulas and all interpretations.
    FormulaGen gen(7, {"a", "b", "c", "d"});
    std::set<std::string> vocab{"a", "b", "c", "d"};
    Vocabulary v = Vocabulary::of(vocab);
    for (int i = 0; i < 300; ++i) {
        Formula f = gen.gen(3);
        CompiledFormula cf(f, v);
        for (Mask t = 0; t < 16; ++t) {
            for (Mask h = t;; h = (h - 1) & t) {
                auto e = cf.eval(h, t);
                if (e.here) REQUIRE(e.there);
                if (h == 0) break;
            }
        }
    }
}

TEST_CASE("negation collapses to classical evaluation") {
    FormulaGen gen(11, {"a", "b", "c"});
    std::set<std::string> vocab{"a", "b", "c"};
    Vocabulary v = Vocabulary::of(vocab);
    for (int i = 0; i < 300; ++i) {
        Formula f = Formula::neg(gen.gen(3));
        CompiledFormula cf(f, v);
        for (Mask t = 0; t < 8; ++t) {
            auto total = cf.eval(t, t);
            for (Mask h = t;; h = (h - 1) & t) {
                REQUIRE(cf.eval(h, t).here == total.there);
                if (h == 0) break;
            }
        }
    }
}

TEST_CASE("equilibrium models satisfy the theory classically") {
    FormulaGen gen(13, {"a", "b", "c"});
    for (int i = 0; i < 100; ++i) {
        std::vector<Formula> gamma{gen.gen(3), gen.gen(2)};
        ModelSet ms = equilibrium_models(gamma, {"a", "b", "c"});
        for (const auto& t : ms.to_sets())
            for (const auto& f : gamma) REQUIRE(classical_satisfies(t, f));
    }
}

TEST_CASE("extension-by-definition model correspondence") {
    // The executable form of the aux-atom correspondence: over
    // At ∪ {x}, an interpretation models ψ[φ/x] ∧ (φ↔x) iff its restriction
    // models ψ, the here part fixes x by ⟨H∩At,T∩At⟩ ⊨ φ, and the there
    // part fixes x by classical satisfaction at T∩At.
    FormulaGen gen(17, {"a", "b"});
    std::set<std::string> at{"a", "b"};
    std::string x = "x";
    std::set<std::string> extended{"a", "b", x};
    Vocabulary ev = Vocabulary::of(extended);
    int xbit = ev.index(x);
    Vocabulary av = Vocabulary::of(at);

    for (int i = 0; i < 600; ++i) {
        Formula psi = gen.gen(3);
        Formula phi = gen.gen(2);
        Formula combined =
            Formula::conj(psi.substitute(phi, Formula::atom(x)), Formula::iff(phi, Formula::atom(x)));
        CompiledFormula cf(combined, ev);
        CompiledFormula cpsi(psi, av);
        CompiledFormula cphi(phi, av);
        // Masks over At are the low bits of the extended vocabulary: names
        // sort as a, b, x.
        REQUIRE(xbit == 2);
        for (Mask t = 0; t < 8; ++t) {
            for (Mask h = t;; h = (h - 1) & t) {
                bool lhs = cf.eval(h, t).here;
                Mask ha = h & 3, ta = t & 3;
                bool psi_holds = cpsi.eval(ha, ta).here;
                bool phi_here = cphi.eval(ha, ta).here;
                bool phi_there = cphi.eval(ta, ta).here;
                bool x_here = (h >> xbit) & 1;
                bool x_there = (t >> xbit) & 1;
                bool rhs = psi_holds && (x_here == phi_here) && (x_there == phi_there);
                REQUIRE(lhs == rhs);
                if (h == 0) break;
            }
        }
    }
}

TEST_CASE("correspondence needs the there-side condition") {
    // Counterexample to the here-only reading: ψ = not a, φ = a, H = ∅,
    // T = {x}. The restriction models ψ and H\At is empty as required, yet
    // φ↔x fails at the there world because x ∈ T while T∩At ⊭ a.
    Formula psi = F("not a");
    Formula phi = F("a");
    Formula combined = Formula::conj(psi.substitute(phi, Formula::atom("x")),
                                     Formula::iff(phi, Formula::atom("x")));
    Vocabulary ev = Vocabulary::of({"a", "x"});
    CompiledFormula cf(combined, ev);
    Mask h = 0, t = Mask(1) << ev.index("x");
    CHECK_FALSE(cf.eval(h, t).here);                        // lhs fails...
    CHECK(ht_satisfies(interp({"a"}, {}, {}), psi));        // ...while ⟨H∩At,T∩At⟩ ⊨ ψ
}

TEST_CASE("negated-pair equivalence (first lemma item) as a property") {
    // ¬(φ1∧φ2) ∧ ¬(¬φ1∧¬φ2) has the same HT models as ¬¬(¬φ1↔φ2).
    FormulaGen gen(23, {"a", "b", "c"});
    for (int i = 0; i < 400; ++i) {
        Formula p1 = gen.gen(3);
        Formula p2 = gen.gen(3);
        Formula lhs = Formula::conj(Formula::neg(Formula::conj(p1, p2)),
                                    Formula::neg(Formula::conj(Formula::neg(p1), Formula::neg(p2))));
        Formula rhs = Formula::neg(Formula::neg(Formula::iff(Formula::neg(p1), p2)));
        REQUIRE(ht_equivalent({lhs}, {rhs}, {"a", "b", "c"}));
    }
}

TEST_CASE("model set ordering is deterministic") {
    Program p = parse_program("{ a }. { b }.");
    ModelSet ms = equilibrium_models(p);
    REQUIRE(ms.size() == 4);
    auto sets = ms.to_sets();
    CHECK(sets[0] == std::set<std::string>{});
    CHECK(sets[1] == std::set<std::string>{"a"});
    CHECK(sets[2] == std::set<std::string>{"b"});
    CHECK(sets[3] == std::set<std::string>{"a", "b"});
}
