#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "austere/parse.hpp"
#include "austere/print.hpp"

using namespace austere;

TEST_CASE("program parsing basics") {
    SECTION("fact, normal rules, classification") {
        Program p = parse_program("a. b :- not c. c :- not b. d :- a, not c.");
        REQUIRE(p.rules.size() == 4);
        CHECK(p.rules[0].kind() == RuleKind::Fact);
        CHECK(p.rules[1].kind() == RuleKind::Normal);
        CHECK(p.rules[2].kind() == RuleKind::Normal);
        CHECK(p.rules[3].kind() == RuleKind::Normal);
    }
    SECTION("empty input") {
        Program p = parse_program("");
        CHECK(p.rules.empty());
    }
    SECTION("interval facts expand") {
        Program p = parse_program("p(1..3).");
        REQUIRE(p.rules.size() == 3);
        CHECK(to_text(p.rules[0]) == "p(1).");
        CHECK(to_text(p.rules[1]) == "p(2).");
        CHECK(to_text(p.rules[2]) == "p(3).");
    }
    SECTION("multi-dimensional interval facts") {
        Program p = parse_program("q(1..2,1..2).");
        CHECK(p.rules.size() == 4);
    }
    SECTION("empty interval warns, does not fail") {
        Program p = parse_program("p(3..1).");
        CHECK(p.rules.empty());
        REQUIRE(p.warnings.size() == 1);
        CHECK(p.warnings[0].severity == Diagnostic::Severity::Warning);
    }
    SECTION("#const substitution") {
        Program p = parse_program("#const n = 2. p(1..n).");
        CHECK(p.rules.size() == 2);
    }
    SECTION("--const overrides #const") {
        Program p = parse_program("#const n = 2. p(1..n).", {{"n", 4}});
        CHECK(p.rules.size() == 4);
    }
    SECTION("comments") {
        Program p = parse_program("% header\na. % trailing\n% :- not a.\n");
        CHECK(p.rules.size() == 1);
    }
    SECTION("definite vs normal") {
        Program p = parse_program("d :- a, b. n :- a, not b.");
        CHECK(p.rules[0].kind() == RuleKind::Definite);
        CHECK(p.rules[1].kind() == RuleKind::Normal);
    }
    SECTION("constraints and choices") {
        Program p = parse_program(":- a, not c. { hc(V,U) } :- edge(V,U).");
        CHECK(p.rules[0].kind() == RuleKind::Constraint);
        CHECK(p.rules[1].kind() == RuleKind::Choice);
    }
    SECTION("bounded choice head") {
        Program p = parse_program("1 { color(N,C) : col(C) } 1 :- node(N).");
        const auto& h = std::get<ChoiceHead>(p.rules[0].head);
        REQUIRE(h.left.has_value());
        REQUIRE(h.right.has_value());
        CHECK(h.elements.size() == 1);
        CHECK(h.elements[0].condition.size() == 1);
    }
    SECTION("body aggregate with negation") {
        Program p = parse_program(":- not 1 #count { color(N,C) : col(C) } 1, node(N).");
        REQUIRE(p.rules.size() == 1);
        const auto* agg = std::get_if<Aggregate>(&p.rules[0].body[0]);
        REQUIRE(agg != nullptr);
        CHECK(agg->negated);
        CHECK(agg->left.has_value());
        CHECK(agg->right.has_value());
    }
    SECTION("brace aggregate without #count") {
        Program p = parse_program(":- { hc(U,V) } >= 2, node(U).");
        const auto* agg = std::get_if<Aggregate>(&p.rules[0].body[0]);
        REQUIRE(agg != nullptr);
        CHECK_FALSE(agg->left.has_value());
        REQUIRE(agg->right.has_value());
        CHECK(agg->right->op == RelOp::Ge);
    }
    SECTION("minimize directive") {
        Program p = parse_program("#minimize { C,X,Y : hc(X,Y), cost(X,Y,C) }.");
        REQUIRE(p.minimizes.size() == 1);
        REQUIRE(p.minimizes[0].elements.size() == 1);
        CHECK(p.minimizes[0].elements[0].tuple.size() == 3);
        CHECK(p.minimizes[0].elements[0].condition.size() == 2);
    }
    SECTION("show directive") {
        Program p = parse_program("#show hc/2.");
        REQUIRE(p.shows.size() == 1);
        CHECK(p.shows[0].predicate == "hc");
        CHECK(p.shows[0].arity == 2);
    }
    SECTION("comparisons and arithmetic") {
        Program p = parse_program("r(I) :- q(I), I > 1. s(X) :- q(X), X = 2*3+1.");
        CHECK(p.rules.size() == 2);
    }
}

TEST_CASE("parse errors carry positions") {
    SECTION("syntax error") {
        try {
            parse_program("a :- b");
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 1);
            CHECK(e.column() >= 6);
        }
    }
    SECTION("arity clash") {
        CHECK_THROWS_WITH(parse_program("p(1). q :- p(1,2)."),
                          Catch::Matchers::ContainsSubstring("arity clash"));
    }
    SECTION("unknown directive") {
        CHECK_THROWS_AS(parse_program("#sum { a }."), parse_error);
    }
    SECTION("nested function terms parse (debug labels)") {
        Program p = parse_program("ic(unreached(V)) :- node(V), not reached(V).");
        CHECK(to_text(p.rules[0]) == "ic(unreached(V)) :- node(V), not reached(V).");
    }
    SECTION("line numbers in errors") {
        try {
            parse_program("a.\nb.\nc :- ,\n");
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 3);
        }
    }
}

TEST_CASE("rule lines recorded per rule") {
    Program p = parse_program("a. b.\nc :- a.\n\nd :- b.");
    CHECK(p.rules[0].line == 1);
    CHECK(p.rules[1].line == 1);
    CHECK(p.rules[2].line == 2);
    CHECK(p.rules[3].line == 4);
}

TEST_CASE("pretty printing round trips") {
    SECTION("simple goldens") {
        CHECK(to_text(parse_program("a.").rules[0]) == "a.");
        CHECK(to_text(parse_program("b :- not c.").rules[0]) == "b :- not c.");
        CHECK(to_text(parse_program("{ b }.").rules[0]) == "{ b }.");
        CHECK(to_text(parse_program(":- a, not c.").rules[0]) == ":- a, not c.");
    }
    SECTION("parse . print . parse is the identity on rules") {
        const char* inputs[] = {
            "p(1). p(2). q(X) :- p(X).",
            "{ hc(V,U) } :- edge(V,U).",
            "reached(V) :- reached(U), hc(U,V).",
            ":- node(V), not reached(V).",
            ":- hc(V,U), hc(V,W), U != W.",
            "1 { color(N,C) : col(C) } 1 :- node(N).",
            ":- not 1 #count { color(N,C) : col(C) } 1, node(N).",
            "#minimize { C,X,Y : hc(X,Y), cost(X,Y,C) }.",
            "blocked(D-1,P,T) :- on(D,P,T), disk(D).",
            "on(D,P,T) :- on(D,P,T-1), not move(D,T), step(T).",
            "covered(I) :- covered(I-1), hasrow(I), I > 1.",
            "ic(c8(V)) :- node(V), not reached(V).",
        };
        for (const char* text : inputs) {
            Program once = parse_program(text);
            std::string printed = to_text(once);
            Program twice = parse_program(printed);
            REQUIRE(once.rules == twice.rules);
            CHECK(to_text(twice) == printed);
        }
    }
}

namespace {

// Random rule generator for the round-trip property.
struct RuleGen {
    std::mt19937 rng;
    explicit RuleGen(unsigned seed) : rng(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    Term int_leaf() {
        return pick(2) ? Term::number(pick(9) - 2)
                       : Term::variable(std::string(1, char('X' + pick(3))));
    }

    Term term(int depth = 0) {
        switch (pick(depth > 0 ? 3 : 5)) {
            case 0: return Term::number(pick(9) - 2);
            case 1: return Term::symbol(std::string(1, char('a' + pick(3))));
            case 2: return Term::variable(std::string(1, char('X' + pick(3))));
            case 3: {
                ArithOp op = static_cast<ArithOp>(pick(4));
                Term rhs = op == ArithOp::Div ? Term::number(1 + pick(3)) : int_leaf();
                return Term::arith(op, int_leaf(), std::move(rhs));
            }
            default: return Term::function("f", {term(1)});
        }
    }

    Atom atom() {
        Atom a;
        a.predicate = std::string(1, char('p' + pick(3)));
        int n = pick(3);
        for (int i = 0; i < n; ++i) a.args.push_back(term());
        return a;
    }

    Rule rule() {
        Rule r;
        switch (pick(3)) {
            case 0: r.head = atom(); break;
            case 1: {
                ChoiceHead h;
                int n = 1 + pick(2);
                for (int i = 0; i < n; ++i) h.elements.push_back({atom(), {}});
                if (pick(2)) h.left = AggregateBound{RelOp::Le, Term::number(pick(3))};
                r.head = h;
                break;
            }
            default: r.head = ConstraintHead{}; break;
        }
        int n = pick(3);
        if (r.is_constraint() && n == 0) n = 1;
        for (int i = 0; i < n; ++i) {
            if (pick(4) == 0) {
                Comparison c;
                c.lhs = term();
                c.op = static_cast<RelOp>(pick(6));
                c.rhs = term();
                r.body.push_back(c);
            } else {
                r.body.push_back(Literal{pick(3) == 0, atom()});
            }
        }
        return r;
    }
};

// Arity bookkeeping breaks random programs, so round-trip one rule at a time
// with distinct predicates enforced by renaming.
void unclash(Rule& r, int& counter) {
    int i = 0;
    auto rename = [&](Atom& a) { a.predicate += std::to_string(counter + i++); };
    if (Atom* a = std::get_if<Atom>(&r.head)) rename(*a);
    if (auto* c = std::get_if<ChoiceHead>(&r.head))
        for (auto& e : c->elements) rename(e.atom);
    for (auto& part : r.body)
        if (auto* lit = std::get_if<Literal>(&part)) rename(lit->atom);
    counter += i;
}

}  // namespace

TEST_CASE("round-trip property on generated rules") {
    // parse . print . parse is the identity on parsed programs.
    RuleGen gen(20240811);
    int counter = 0;
    for (int i = 0; i < 500; ++i) {
        Rule r = gen.rule();
        unclash(r, counter);
        std::string text = to_text(r);
        Program once;
        try {
            once = parse_program(text);
        } catch (const parse_error& e) {
            FAIL("failed to reparse: " << text << " (" << e.what() << ")");
        }
        INFO(text);
        Program twice = parse_program(to_text(once));
        CHECK(once.rules == twice.rules);
    }
}

TEST_CASE("classification soundness on exhaustive small rules") {
    // All rules over two atoms with bodies of up to two literals.
    std::vector<std::string> atoms = {"a", "b"};
    std::vector<std::pair<std::string, bool>> literals;
    for (const auto& a : atoms) {
        literals.push_back({a, false});
        literals.push_back({a, true});
    }
    for (int head = 0; head < 3; ++head) {  // a, b, constraint
        for (std::size_t i = 0; i <= literals.size(); ++i) {
            for (std::size_t j = i; j <= literals.size(); ++j) {
                std::string body;
                bool has_neg = false;
                int nbody = 0;
                auto add = [&](std::size_t k) {
                    if (k >= literals.size()) return;
                    if (nbody) body += ", ";
                    if (literals[k].second) {
                        body += "not ";
                        has_neg = true;
                    }
                    body += literals[k].first;
                    ++nbody;
                };
                body.clear();
                nbody = 0;
                has_neg = false;
                add(i);
                if (j != i) add(j);
                std::string text;
                if (head < 2) {
                    text = atoms[head];
                    if (nbody) text += " :- " + body;
                    text += ".";
                } else {
                    if (!nbody) continue;
                    text = ":- " + body + ".";
                }
                Program p = parse_program(text);
                REQUIRE(p.rules.size() == 1);
                RuleKind k = p.rules[0].kind();
                if (head == 2) {
                    CHECK(k == RuleKind::Constraint);
                } else if (nbody == 0) {
                    CHECK(k == RuleKind::Fact);
                } else if (has_neg) {
                    CHECK(k == RuleKind::Normal);
                } else {
                    CHECK(k == RuleKind::Definite);
                }
            }
        }
    }
}
