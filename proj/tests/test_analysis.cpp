#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "austere/analysis.hpp"
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

Program load(const std::string& name) { return parse_program(slurp(name)); }

std::vector<std::set<int>> line_sets(const Stratification& s) {
    std::vector<std::set<int>> out;
    for (const auto& st : s.strata) out.push_back(st.lines);
    return out;
}

}  // namespace

TEST_CASE("dependency graph") {
    SECTION("hamiltonian circuit dependencies") {
        Program p = load("ham.lp");
        DependencyGraph g = dependency_graph(p);
        // reached depends on hc, edge, start and itself; hc on edge only.
        auto depends_on = [&](const std::string& pred) {
            std::set<std::string> out;
            for (const auto& q : g.nodes)
                if (g.depends(pred, q)) out.insert(q);
            return out;
        };
        CHECK(depends_on("reached") ==
              std::set<std::string>{"hc", "edge", "start", "reached"});
        CHECK(depends_on("hc") == std::set<std::string>{"edge"});
        CHECK_FALSE(g.depends("hc", "reached"));
        // Constraints define the #false pseudo-predicate.
        CHECK(g.depends(kConstraintNode, "reached"));
        CHECK(g.depends(kConstraintNode, "edge"));
    }
    SECTION("mutual dependency") {
        Program p = parse_program("a :- b. b :- a.");
        DependencyGraph g = dependency_graph(p);
        CHECK(g.depends("a", "b"));
        CHECK(g.depends("b", "a"));
    }
    SECTION("single fact: node without edges") {
        Program p = parse_program("p.");
        DependencyGraph g = dependency_graph(p);
        CHECK(g.nodes == std::set<std::string>{"p"});
        CHECK(g.edges.empty());
    }
    SECTION("edges carry polarity and witnesses") {
        Program p = parse_program("a :- b, not c.");
        DependencyGraph g = dependency_graph(p);
        REQUIRE(g.has_edge("a", "b"));
        REQUIRE(g.has_edge("a", "c"));
        CHECK(g.edges.at({"a", "b"}).positive);
        CHECK_FALSE(g.edges.at({"a", "b"}).negative);
        CHECK(g.edges.at({"a", "c"}).negative);
        CHECK(g.edges.at({"a", "c"}).witnesses == std::vector<int>{0});
    }
}

TEST_CASE("definitions") {
    Program p = load("ham.lp");
    SECTION("def(reached) is the two rules on lines 6-7") {
        auto idx = definition_indices(p, "reached");
        std::set<int> lines;
        for (int i : idx) lines.insert(p.rules[i].line);
        CHECK(lines == std::set<int>{6, 7});
    }
    SECTION("constraints are the definition of #false (lines 8-10)") {
        auto idx = definition_indices(p, kConstraintNode);
        std::set<int> lines;
        for (int i : idx) lines.insert(p.rules[i].line);
        CHECK(lines == std::set<int>{8, 9, 10});
    }
    SECTION("unknown predicate is an error") {
        CHECK_THROWS_AS(definition_indices(p, "nosuch"), std::runtime_error);
    }
    SECTION("defined predicate with no rules does not happen; empty def only via facts") {
        Program q = parse_program("p. q :- p.");
        CHECK(definition_indices(q, "p").size() == 1);
    }
}

TEST_CASE("stratification goldens") {
    SECTION("hamiltonian circuit listing") {
        Stratification s = stratify(load("ham.lp"));
        CHECK(render_stratification(s) == "({1,2,3},{5},{6,7},{8,9,10})");
        REQUIRE(s.strata.size() == 4);
        CHECK(s.strata[0].kind == Stratum::Kind::Facts);
        CHECK(s.strata[1].kind == Stratum::Kind::Choices);
        CHECK(s.strata[2].kind == Stratum::Kind::Defines);
        CHECK(s.strata[3].kind == Stratum::Kind::Checks);
    }
    SECTION("queens listing") {
        Stratification s = stratify(load("queens.ez"));
        CHECK(render_stratification(s) == "(∅,{1},{3,4},{6,7},{9,10})");
        REQUIRE(s.strata.size() == 5);
        CHECK(s.strata[0].rules.empty());
        CHECK(s.strata[2].predicates == std::set<std::string>{"hasrow", "hascol"});
        CHECK(s.strata[3].predicates == std::set<std::string>{"covered"});
    }
    SECTION("mutually recursive programs sit in a single partition") {
        Stratification s = stratify(parse_program("a :- not b. b :- not a."));
        REQUIRE(s.strata.size() == 1);
        CHECK(s.strata[0].kind == Stratum::Kind::Defines);
        CHECK(s.strata[0].rules == std::vector<int>{0, 1});
    }
    SECTION("facts then defines by depth") {
        Stratification s = stratify(parse_program("q.\np :- q.\nr :- not p.\n"));
        REQUIRE(s.strata.size() == 3);
        CHECK(line_sets(s) == std::vector<std::set<int>>{{1}, {2}, {3}});
    }
}

TEST_CASE("easy classification goldens") {
    SECTION("coloring rewrite: choice, bound guard, plain check") {
        EasyDecomposition d = classify_easy(load("color.ez"));
        CHECK(d.easy());
        CHECK(render_stratification(d.strat) == "(∅,{1},{2},{3})");
        REQUIRE(d.strat.strata.size() == 4);
        CHECK(d.strat.strata[0].kind == Stratum::Kind::Facts);   // instance facts go here
        CHECK(d.strat.strata[1].kind == Stratum::Kind::Choices);
        CHECK(d.strat.strata[2].kind == Stratum::Kind::Guards);
        CHECK(d.strat.strata[3].kind == Stratum::Kind::Checks);
    }
    SECTION("coloring rewrite with an instance keeps the shape") {
        Program p = parse_program(slurp("color_instance.lp") + slurp("color.ez"));
        EasyDecomposition d = classify_easy(p);
        CHECK(d.easy());
        REQUIRE(d.strat.strata.size() == 4);
        CHECK(d.strat.strata[0].kind == Stratum::Kind::Facts);
        CHECK_FALSE(d.strat.strata[0].rules.empty());
    }
    SECTION("towers of hanoi listing") {
        EasyDecomposition d = classify_easy(load("toh.ez"));
        CHECK(d.easy());
        CHECK(render_stratification(d.strat) ==
              "({1,2,3,4},{6},{8},{10,11,12},{14,15},{17,19,20,21,23})");
    }
    SECTION("hamiltonian circuit is easy") {
        EasyDecomposition d = classify_easy(load("ham.lp"));
        CHECK(d.easy());
    }
    SECTION("negative self-dependency is not easy") {
        EasyDecomposition d = classify_easy(parse_program("a :- not a."));
        CHECK_FALSE(d.easy());
        REQUIRE_FALSE(d.violations.empty());
        CHECK(d.violations[0].message.find("depends negatively on itself") != std::string::npos);
    }
    SECTION("choices depending on derived predicates are flagged") {
        EasyDecomposition d = classify_easy(parse_program("p :- q. { a } :- p. q."));
        CHECK_FALSE(d.easy());
    }
    SECTION("aggregate heads are flagged until eliminated") {
        EasyDecomposition d = classify_easy(load("color.lp"));
        CHECK_FALSE(d.easy());
    }
    SECTION("empty program is easy with no parts") {
        EasyDecomposition d = classify_easy(parse_program(""));
        CHECK(d.easy());
        CHECK(d.strat.strata.empty());
        CHECK(render_stratification(d.strat) == "()");
    }
}

TEST_CASE("stratified negation check") {
    SECTION("positive recursion is tolerated") {
        CHECK(check_stratified_negation(parse_program("a :- b. b :- a.")).ok);
    }
    SECTION("negative recursion is ruled out") {
        CHECK_FALSE(check_stratified_negation(parse_program("a :- not b. b :- not a.")).ok);
        CHECK_FALSE(check_stratified_negation(parse_program("a :- not a.")).ok);
    }
    SECTION("negation across strata is fine") {
        CHECK(check_stratified_negation(parse_program("q. p :- q. r :- not p.")).ok);
    }
    SECTION("negation in constraints is exempt") {
        CHECK(check_stratified_negation(load("ham.lp")).ok);
    }
    SECTION("towers of hanoi has stratified negation") {
        CHECK(check_stratified_negation(load("toh.ez")).ok);
    }
}

TEST_CASE("austere check") {
    SECTION("the operational-semantics example is austere") {
        CHECK(check_austere(parse_program("a. { b }. c :- b. :- a, not c.")).ok);
    }
    SECTION("normal rules with negation are not") {
        auto r = check_austere(parse_program("b :- not c."));
        CHECK_FALSE(r.ok);
        REQUIRE(r.diagnostics.size() == 1);
    }
    SECTION("non-ground choices with bodies are not austere as written") {
        CHECK_FALSE(check_austere(load("ham.lp")).ok);
    }
}

TEST_CASE("stratification validator (definition conditions)") {
    // Independent check of the stratification conditions on programs the
    // classifier accepts: every definition sits in one stratum, and strict
    // (non-mutual) dependencies point strictly downward.
    auto validate = [](const Program& p, const Stratification& s) {
        DependencyGraph g = dependency_graph(p);
        // Item 1: def(pred) within a single stratum.
        std::map<std::string, std::set<int>> strata_of;
        for (int i = 0; i < (int)s.strata.size(); ++i)
            for (int r : s.strata[i].rules) {
                const Rule& rule = p.rules[r];
                if (const Atom* head = rule.head_atom()) strata_of[head->predicate].insert(i);
                if (const auto* c = std::get_if<ChoiceHead>(&rule.head))
                    for (const auto& e : c->elements) strata_of[e.atom.predicate].insert(i);
            }
        for (const auto& [pred, in] : strata_of) REQUIRE(in.size() == 1);
        // Items 2a/2b over all predicate pairs.
        for (const auto& [pp, si] : strata_of) {
            for (const auto& [qq, sj] : strata_of) {
                if (pp == qq) continue;
                if (!g.depends(pp, qq)) continue;
                int i = *si.begin(), j = *sj.begin();
                if (g.depends(qq, pp)) {
                    REQUIRE(i == j);  // 2b: mutual dependency, same stratum
                } else {
                    REQUIRE(i > j);  // 2a: strictly above
                }
            }
        }
        // Constraints: all body dependencies strictly below.
        for (const auto& st : s.strata) {
            if (st.kind != Stratum::Kind::Guards && st.kind != Stratum::Kind::Checks) continue;
            int ci = int(&st - s.strata.data());
            for (int r : st.rules)
                for (const auto& part : p.rules[r].body) {
                    if (const auto* lit = std::get_if<Literal>(&part)) {
                        auto it = strata_of.find(lit->atom.predicate);
                        if (it != strata_of.end()) REQUIRE(*it->second.begin() < ci);
                    }
                }
        }
    };

    for (const char* name : {"ham.lp", "queens.ez", "toh.ez", "color.ez", "tsp.lp"}) {
        INFO(name);
        Program p = load(name);
        EasyDecomposition d = classify_easy(p);
        REQUIRE(d.easy());
        validate(p, d.strat);
    }
}

TEST_CASE("stratum depth is maximal (refinement)") {
    // Within one define stratum, any two predicates are either mutually
    // dependent or have the same independently computed dependency depth.
    auto depth_of = [](const Program& p) {
        DependencyGraph g = dependency_graph(p);
        std::set<std::string> defined;
        for (const auto& r : p.rules)
            if (const Atom* head = r.head_atom(); head && !r.body.empty())
                defined.insert(head->predicate);
        std::map<std::string, int> depth;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& pred : defined) {
                int d = 1;
                for (const auto& dep : g.direct_dependencies(pred)) {
                    if (!defined.count(dep) || dep == pred) continue;
                    if (g.depends(dep, pred)) continue;  // mutual: same component
                    auto it = depth.find(dep);
                    if (it != depth.end()) d = std::max(d, it->second + 1);
                }
                if (depth[pred] != d) {
                    depth[pred] = d;
                    changed = true;
                }
            }
        }
        return depth;
    };
    for (const char* name : {"ham.lp", "queens.ez", "toh.ez"}) {
        INFO(name);
        Program p = load(name);
        auto depth = depth_of(p);
        Stratification s = stratify(p);
        for (const auto& st : s.strata) {
            if (st.kind != Stratum::Kind::Defines) continue;
            std::set<int> depths;
            for (const auto& pred : st.predicates) depths.insert(depth.at(pred));
            REQUIRE(depths.size() == 1);  // one depth per stratum
        }
    }
}

TEST_CASE("classification decomposition reproduces the rule multiset") {
    for (const char* name : {"ham.lp", "queens.ez", "toh.ez", "color.ez", "tsp.lp"}) {
        INFO(name);
        Program p = load(name);
        Stratification s = stratify(p);
        std::multiset<int> in_strata;
        for (const auto& st : s.strata)
            for (int r : st.rules) in_strata.insert(r);
        std::multiset<int> all;
        for (int i = 0; i < (int)p.rules.size(); ++i) all.insert(i);
        CHECK(in_strata == all);
    }
}

TEST_CASE("austere implies stratified negation") {
    // Definite define parts satisfy the stratified-negation condition
    // vacuously.
    for (const char* text :
         {"a. { b }. c :- b. :- a, not c.", "p. q :- p. { r }. s :- r, q.", ""}) {
        Program p = parse_program(text);
        if (check_austere(p).ok) CHECK(check_stratified_negation(p).ok);
    }
}

TEST_CASE("definition of a bodiless predicate is empty") {
    Program p = parse_program("q :- p.");
    CHECK(definition_indices(p, "p").empty());
}

TEST_CASE("style lints are notes, not violations") {
    SECTION("multi-predicate strata get the one-predicate-per-stratum note") {
        Stratification s = stratify(load("queens.ez"));
        bool note = false;
        for (const auto& d : s.diagnostics)
            if (d.severity == Diagnostic::Severity::Note &&
                d.message.find("one predicate per stratum") != std::string::npos)
                note = true;
        CHECK(note);
        CHECK(classify_easy(load("queens.ez")).easy());  // notes do not break easiness
    }
    SECTION("interleaved constraints get an ordering note") {
        Program p = parse_program("a.\n:- not b.\nb :- a.\n");
        Stratification s = stratify(p);
        bool note = false;
        for (const auto& d : s.diagnostics)
            if (d.message.find("conventionally come last") != std::string::npos) note = true;
        CHECK(note);
        // Structure still classifies: constraints land in the final stratum.
        CHECK(s.strata.back().kind == Stratum::Kind::Checks);
    }
}
