#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "austere/analysis.hpp"
#include "austere/ground.hpp"
#include "austere/parse.hpp"

using namespace austere;

namespace {

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(AUSTERE_ENCODINGS_DIR) + "/" + name);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GroundProgram G(const std::string& text) { return ground(parse_program(text)); }

std::set<std::string> atom_names(const GroundProgram& g) {
    return {g.table.names.begin(), g.table.names.end()};
}

std::set<std::string> fact_names(const GroundProgram& g) {
    std::set<std::string> out;
    for (int id : g.facts) out.insert(g.table.names[id]);
    return out;
}

std::set<std::string> choice_names(const GroundProgram& g) {
    std::set<std::string> out;
    for (int id : g.choice_atoms) out.insert(g.table.names[id]);
    return out;
}

}  // namespace

TEST_CASE("basic instantiation") {
    SECTION("facts drive rule instantiation") {
        GroundProgram g = G("p(1..2). q(X) :- p(X).");
        CHECK(atom_names(g) == std::set<std::string>{"p(1)", "p(2)", "q(1)", "q(2)"});
        // Bodies over facts are certain, so the instances land in the facts.
        CHECK(fact_names(g) == atom_names(g));
    }
    SECTION("unsafe rules are rejected with the variable name") {
        CHECK_THROWS_WITH(G("p(1). q(X) :- not p(X)."),
                          Catch::Matchers::ContainsSubstring("'X'"));
        CHECK_THROWS_WITH(G("p(1). q(X) :- p(X), Y > Z, p(Y)."),
                          Catch::Matchers::ContainsSubstring("unsafe"));
    }
    SECTION("head variables must be bound") {
        CHECK_THROWS_WITH(G("p(1). q(Y) :- p(X)."),
                          Catch::Matchers::ContainsSubstring("unsafe"));
    }
    SECTION("comparisons evaluate during grounding") {
        GroundProgram g = G("d(1..3). p(X) :- d(X), X > 1.");
        CHECK(fact_names(g) ==
              std::set<std::string>{"d(1)", "d(2)", "d(3)", "p(2)", "p(3)"});
    }
    SECTION("interval membership comparisons act as generators") {
        GroundProgram g = G("q(1..4). p(X) :- q(X), X = 2..3.");
        std::set<std::string> names = fact_names(g);
        CHECK(names.count("p(2)"));
        CHECK(names.count("p(3)"));
        CHECK_FALSE(names.count("p(1)"));
        CHECK_FALSE(names.count("p(4)"));
    }
    SECTION("binding comparisons enumerate intervals") {
        GroundProgram g = G("{ queen(I,J) : I = 1..2, J = 1..2 }.");
        CHECK(choice_names(g) == std::set<std::string>{"queen(1,1)", "queen(1,2)",
                                                       "queen(2,1)", "queen(2,2)"});
    }
    SECTION("arithmetic in heads and bodies") {
        GroundProgram g = G("d(1..2). s(X+1) :- d(X).");
        std::set<std::string> names = fact_names(g);
        CHECK(names.count("s(2)"));
        CHECK(names.count("s(3)"));
    }
    SECTION("arithmetic matching against derived values") {
        // on(D,T-1) style lookup: T bound first, T-1 evaluated.
        GroundProgram g = G("st(1..2). base(0). up(T) :- st(T), base(T-1).");
        CHECK(fact_names(g).count("up(1)"));
        CHECK_FALSE(fact_names(g).count("up(2)"));
    }
    SECTION("division by zero is an error") {
        CHECK_THROWS_WITH(G("d(1). p(X/0) :- d(X)."),
                          Catch::Matchers::ContainsSubstring("division by zero"));
    }
}

TEST_CASE("simplification against certain facts") {
    SECTION("negation on underivable atoms drops") {
        GroundProgram g = G("p :- not q.");
        CHECK(fact_names(g) == std::set<std::string>{"p"});
        CHECK(g.defines.empty());
    }
    SECTION("negation on facts kills the rule") {
        GroundProgram g = G("q. p :- not q.");
        CHECK(fact_names(g) == std::set<std::string>{"q"});
        CHECK_FALSE(atom_names(g).count("p"));
    }
    SECTION("positive literals on non-domain atoms never fire") {
        GroundProgram g = G("p :- q.");
        CHECK(atom_names(g).empty());
    }
    SECTION("choice-dependent bodies stay open") {
        GroundProgram g = G("{ b }. c :- b.");
        REQUIRE(g.defines.size() == 1);
        CHECK(g.table.names[g.defines[0].head] == "c");
        CHECK(choice_names(g) == std::set<std::string>{"b"});
    }
    SECTION("negation on choice atoms stays open") {
        GroundProgram g = G("{ b }. c :- not b.");
        REQUIRE(g.defines.size() == 1);
        CHECK(g.defines[0].neg.size() == 1);
        CHECK(g.is_definite() == false);
    }
}

TEST_CASE("choice rules ground to plain choices") {
    SECTION("the hamiltonian guess yields one choice atom per arc") {
        GroundProgram g = ground(parse_program(slurp("ham.lp")));
        CHECK(g.choice_atoms.size() == 7);
        CHECK(choice_names(g).count("hc(1,2)"));
        CHECK(choice_names(g).count("hc(4,3)"));
    }
    SECTION("grounded hamiltonian listing is austere") {
        GroundProgram g = ground(parse_program(slurp("ham.lp")));
        Program back = ground_to_program(g);
        CHECK(check_austere(back).ok);
        CHECK(g.is_definite());
    }
    SECTION("fact-certain choice bodies simplify away") {
        // q is a fact, so p is certain and the guard disappears.
        GroundProgram g = G("p :- q. { a } :- p. q.");
        CHECK(choice_names(g) == std::set<std::string>{"a"});
    }
    SECTION("choices guarded by open predicates are rejected") {
        CHECK_THROWS_WITH(G("{ b }. p :- b. { a } :- p."),
                          Catch::Matchers::ContainsSubstring("choice"));
    }
    SECTION("facts absorb duplicate choice atoms") {
        GroundProgram g = G("b. { b }.");
        CHECK(g.choice_atoms.empty());
        CHECK(fact_names(g) == std::set<std::string>{"b"});
    }
    SECTION("bounded choice heads must be eliminated first") {
        CHECK_THROWS_WITH(G("node(1). col(r). 1 { color(N,C) : col(C) } 1 :- node(N)."),
                          Catch::Matchers::ContainsSubstring("bounded choice"));
    }
}

TEST_CASE("aggregate grounding in constraints") {
    SECTION("elements expand over their conditions") {
        Program p = parse_program(slurp("color_instance.lp") +
                                  "{ color(N,C) } :- node(N), col(C).\n"
                                  ":- not 1 #count { color(N,C) : col(C) } 1, node(N).\n");
        GroundProgram g = ground(p);
        REQUIRE(g.constraints.size() == 3);  // one per node
        for (const auto& c : g.constraints) {
            REQUIRE(c.aggregates.size() == 1);
            CHECK(c.aggregates[0].negated);
            CHECK(c.aggregates[0].elements.size() == 3);  // one per color
            CHECK(c.aggregates[0].left.has_value());
            CHECK(c.aggregates[0].right.has_value());
        }
    }
    SECTION("unsafe aggregate elements are reported") {
        CHECK_THROWS_WITH(G("n(1). :- not 1 #count { q(X) } 1, n(Y)."),
                          Catch::Matchers::ContainsSubstring("X"));
    }
}

TEST_CASE("minimize grounding") {
    SECTION("weighted tuples with conditions") {
        GroundProgram g = ground(parse_program(slurp("tsp.lp")));
        REQUIRE(g.minimize.size() == 7);
        long long total = 0;
        for (const auto& e : g.minimize) total += e.weight;
        CHECK(total == 3 + 5 + 6 + 4 + 7 + 5 + 7);
    }
    SECTION("schematic atom elements get weight one") {
        GroundProgram g = G("{ a }. ic(1) :- a. #minimize { ic(I) }.");
        REQUIRE(g.minimize.size() == 1);
        CHECK(g.minimize[0].weight == 1);
        REQUIRE(g.minimize[0].alternatives.size() == 1);
        REQUIRE(g.minimize[0].alternatives[0].size() == 1);
    }
    SECTION("non-integer weights with a multi-term tuple are rejected") {
        CHECK_THROWS_WITH(G("c(x). #minimize { W,1 : c(W) }."),
                          Catch::Matchers::ContainsSubstring("weight"));
    }
}

TEST_CASE("define strata are attached for stratified evaluation") {
    GroundProgram g = ground(parse_program(slurp("toh.ez")));
    REQUIRE(g.define_strata_count == 3);
    CHECK(g.define_stratum.at("moved") == 0);
    CHECK(g.define_stratum.at("on") == 1);
    CHECK(g.define_stratum.at("blocked") == 2);
    CHECK_FALSE(g.is_definite());
}

TEST_CASE("ground_to_program reconstructs the program") {
    GroundProgram g = G("p(1..2). { c(1) }. q(X) :- p(X), c(1). :- q(1), not q(2).");
    Program back = ground_to_program(g);
    GroundProgram again = ground(back);
    CHECK(atom_names(again) == atom_names(g));
    CHECK(fact_names(again) == fact_names(g));
    CHECK(again.defines.size() == g.defines.size());
    CHECK(again.constraints.size() == g.constraints.size());
}

TEST_CASE("grounding is deterministic") {
    std::string text = slurp("toh.ez");
    GroundProgram g1 = ground(parse_program(text));
    GroundProgram g2 = ground(parse_program(text));
    CHECK(g1.table.names == g2.table.names);
    CHECK(g1.facts == g2.facts);
    CHECK(g1.choice_atoms == g2.choice_atoms);
}
