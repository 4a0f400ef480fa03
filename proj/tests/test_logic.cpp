#include <doctest.h>

#include <nlohmann/json.hpp>

#include "haystacks/ground.hpp"
#include "haystacks/logic.hpp"
#include "haystacks/rng.hpp"
#include "haystacks/sat.hpp"
#include "haystacks/tptp.hpp"
#include "support.hpp"

using namespace haystacks;
using namespace haystacks::testing;

TEST_CASE("negate cancels double negation") {
    FormulaPtr a = Formula::make_atom("p", {Term::constant("a")});
    CHECK(formula_equal(negate(negate(a)), a));
    CHECK(negate(a)->kind == Formula::Kind::Not);
    FormulaPtr all = Formula::forall_in_room(Formula::make_atom("p", {Term::variable(0)}));
    FormulaPtr neg = negate(all);
    REQUIRE(neg->kind == Formula::Kind::Not);
    CHECK(formula_equal(neg->kids[0], all));
}

TEST_CASE("quantifier expansion over a 2-element roster") {
    Domain d;
    d.roster = {"mary", "nina"};
    d.signature = {{"happy", 1}, {"rich", 1}};
    FormulaPtr f = Formula::forall_in_room(
        Formula::make_implies(Formula::make_atom("happy", {Term::variable(0)}),
                              Formula::make_atom("rich", {Term::variable(0)})));
    GroundCNF cnf = ground({{0, f}}, d);
    // two roster members -> two implication clauses, all tagged source 0
    CHECK(cnf.clauses.size() == 2);
    for (const auto& c : cnf.clauses) {
        CHECK(c.lits.size() == 2);
        REQUIRE(c.sources.size() == 1);
        CHECK(c.sources[0] == 0);
    }
    CHECK(cnf.var_of_atom.count("happy(mary)") == 1);
    CHECK(cnf.var_of_atom.count("rich(nina)") == 1);
}

TEST_CASE("atoms ground to unit clauses") {
    Domain d;
    d.roster = {"mary"};
    d.signature = {{"happy", 1}};
    FormulaPtr a = Formula::make_atom("happy", {Term::constant("mary")});
    GroundCNF cnf = ground({{0, a}, {1, Formula::make_not(a)}}, d);
    REQUIRE(cnf.clauses.size() == 2);
    int v = cnf.var_of_atom.at("happy(mary)");
    CHECK(cnf.clauses[0].lits == std::vector<int>{v});
    CHECK(cnf.clauses[0].sources == std::vector<int>{0});
    CHECK(cnf.clauses[1].lits == std::vector<int>{-v});
    CHECK(cnf.clauses[1].sources == std::vector<int>{1});
}

TEST_CASE("at-least-two over three roster members has exactly 4 models") {
    Domain d;
    d.roster = {"a", "b", "c"};
    d.signature = {{"romantic", 1}};
    FormulaPtr f =
        Formula::at_least_k(2, Formula::make_atom("romantic", {Term::variable(0)}));
    // oracle: 4 of the 8 assignments have >= 2 true atoms
    CHECK(bruteforce_model_count({{0, f}}, d) == 4);
    GroundCNF cnf = ground({{0, f}}, d);
    CHECK(enumerate_models(cnf).size() == 4);
}

TEST_CASE("grounding is equisatisfiable with brute-force evaluation") {
    Domain d = tiny_domain();
    auto rng = make_rng(20240817);
    for (int i = 0; i < 200; ++i) {
        auto fs = random_instance(rng, d, 1 + i % 3);
        GroundCNF cnf = ground(fs, d);
        auto [verdict, stats] = solve(cnf);
        CHECK(verdict.sat() == bruteforce_sat(fs, d));
    }
}

TEST_CASE("source soundness: dropping a source id leaves the others' grounding") {
    Domain d = tiny_domain();
    auto rng = make_rng(7);
    for (int i = 0; i < 50; ++i) {
        auto fs = random_instance(rng, d, 3);
        GroundCNF full = ground(fs, d);
        std::vector<std::pair<int, FormulaPtr>> keep{fs[0], fs[2]};
        GroundCNF partial = ground(keep, d);
        std::size_t survivors = 0;
        for (const auto& c : full.clauses)
            if (c.sources != std::vector<int>{1})
                ++survivors;
        CHECK(survivors == partial.clauses.size());
    }
}

TEST_CASE("grounding and TPTP emission are deterministic") {
    Domain d = tiny_domain();
    auto rng = make_rng(99);
    auto fs = random_instance(rng, d, 3);
    GroundCNF a = ground(fs, d);
    GroundCNF b = ground(fs, d);
    CHECK(to_dimacs(a) == to_dimacs(b));
    CHECK(a.atom_of_var == b.atom_of_var);
    CHECK(emit_tptp(fs, d) == emit_tptp(fs, d));
}

TEST_CASE("unknown constant and predicate raise signature errors") {
    Domain d = tiny_domain();
    CHECK_THROWS_AS(ground({{0, Formula::make_atom("p", {Term::constant("zz")})}}, d),
                    SignatureError);
    CHECK_THROWS_AS(ground({{0, Formula::make_atom("nope", {Term::constant("a")})}}, d),
                    SignatureError);
    // arity mismatch
    CHECK_THROWS_AS(ground({{0, Formula::make_atom("r", {Term::constant("a")})}}, d),
                    SignatureError);
}

TEST_CASE("depth over the limit raises a structural error") {
    Domain d = tiny_domain();
    FormulaPtr f = Formula::make_atom("s");
    for (int i = 0; i < 9; ++i)
        f = Formula::make_and({f, Formula::make_atom("s")});
    CHECK_THROWS_AS(ground({{0, f}}, d, 6), StructuralError);
}

TEST_CASE("nested at-least-k is rejected") {
    Domain d = tiny_domain();
    FormulaPtr inner =
        Formula::at_least_k(1, Formula::make_atom("p", {Term::variable(0)}));
    CHECK_THROWS_AS(ground({{0, Formula::make_not(inner)}}, d), StructuralError);
}

TEST_CASE("formula JSON round-trip") {
    Domain d = tiny_domain();
    auto rng = make_rng(12);
    for (int i = 0; i < 100; ++i) {
        FormulaPtr f = random_formula(rng, 3, 0, d);
        FormulaPtr back = formula_from_json(formula_to_json(f));
        CHECK(formula_equal(f, back));
    }
}

TEST_CASE("TPTP structure") {
    Domain d;
    d.roster = {"mary", "nina"};
    d.signature = {{"happy", 1}};
    std::string text =
        emit_tptp({{0, Formula::make_atom("happy", {Term::constant("mary")})}}, d);
    CHECK(text.find("fof(c0, axiom, happy(mary)).") != std::string::npos);
    CHECK(text.find("fof(room_member_mary, axiom, in_room(mary)).") != std::string::npos);
    CHECK(text.find("roster_distinct") != std::string::npos);
    CHECK(text.find("roster_closure") != std::string::npos);

    std::string empty = emit_tptp({}, d);
    CHECK(empty.find("fof(c") == std::string::npos);
    CHECK(empty.find("roster_closure") != std::string::npos);
}

TEST_CASE("TPTP names every clause of the intro premise") {
    IntroExample intro;
    std::vector<std::pair<int, FormulaPtr>> fs;
    for (const auto& c : intro.premise)
        fs.emplace_back(c.id, c.formula);
    fs.emplace_back(intro.hypothesis.id, intro.hypothesis.formula);
    std::string text = emit_tptp(fs, intro.grammar.domain());
    for (int id = 0; id < 4; ++id)
        CHECK(text.find("fof(c" + std::to_string(id) + ", axiom,") != std::string::npos);
}
