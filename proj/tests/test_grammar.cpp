#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "slrkit/error.hpp"
#include "slrkit/grammar.hpp"
#include "slrkit/slr_semantics.hpp"

using namespace slrkit;

TEST_CASE("parse tree counts on the fixtures")
{
    for (const auto& name : fixture::fixture_names()) {
        CAPTURE(name);
        const Sid s = fixture::sid(name);
        // Exactly one tree per size from 2 on: every recursion has a single choice of rule.
        for (std::size_t bound = 1; bound <= 6; ++bound) {
            CHECK(enumerate_parse_trees(s, "A", bound).size() == bound - 1);
        }
        for (const auto& t : enumerate_parse_trees(s, "A", 6)) {
            CHECK(is_parse_tree(s, t));
        }
    }
}

TEST_CASE("parse tree structure")
{
    const Sid b = fixture::mixed();
    const auto trees = enumerate_parse_trees(b, "A", 3);
    REQUIRE(trees.size() == 2);
    CHECK(serialize(trees[0]) == "A[A.0(B[C.0()])]");
    CHECK(serialize(trees[1]) == "A[A.0(B[C.0(),C.0()])]");
    CHECK(productive_edges(trees[1]) == 3);
    CHECK(rule_counts(trees[1]) == std::map<std::string, std::size_t>{{"A.0", 1}, {"C.0", 2}});

    ParseTree wrong = trees[0];
    wrong.edges[0].rule = "C.0";
    CHECK_FALSE(is_parse_tree(b, wrong));

    const auto j = nlohmann::json::parse(parse_tree_to_json(trees[1]));
    CHECK(j["pred"] == "A");
    CHECK(j["edges"].size() == 1);
}

TEST_CASE("rich canonical model sizes")
{
    struct Expect {
        std::string file;
        std::vector<std::pair<std::size_t, std::size_t>> sizes;
    };
    const std::vector<Expect> expected = {
        {"productive_only.sid", {{3, 3}, {4, 5}, {5, 7}}},
        {"mixed.sid", {{3, 2}, {5, 4}, {7, 6}}},
        {"mixed_rigid.sid", {{3, 4}, {5, 8}, {7, 12}}},
    };
    for (const auto& e : expected) {
        CAPTURE(e.file);
        const Sid s = fixture::sid(e.file);
        const auto trees = enumerate_parse_trees(s, "A", 4);
        REQUIRE(trees.size() == e.sizes.size());
        for (std::size_t i = 0; i < trees.size(); ++i) {
            const auto rich = rich_canonical_model(s, trees[i]);
            REQUIRE(rich);
            CHECK(rich->graph.num_vertices() == e.sizes[i].first);
            CHECK(rich->graph.num_edges() == e.sizes[i].second);
        }
    }
}

TEST_CASE("characteristic formulas are satisfied by their canonical models")
{
    for (const auto& name : fixture::fixture_names()) {
        const Sid s = fixture::sid(name);
        for (const auto& t : enumerate_parse_trees(s, "A", 4)) {
            const CharFormula cf = char_formula(s, t);
            CHECK(cf.free.empty());
            CHECK(is_qpf(cf.formula));
            const auto rich = rich_canonical_model(s, t);
            REQUIRE(rich);
            CHECK(slr_models(project(rich->graph, s.alphabet), rich->store, cf.formula, s) == Verdict::True);
            CHECK(slr_models(project(rich->graph, s.alphabet), {}, SlrFormula::pred("A", {}), s) == Verdict::True);
        }
    }
}

TEST_CASE("unsatisfiable trees have no canonical model")
{
    const Sid s = parse_sid("alphabet b/2 ; A() <= exists y . b(y,y) * B(y) ; B(x1) <= exists y . b(x1,y) * x1 != y * C(y) ;"
                            "C(x1) <= exists y . b(x1,x1) * b(x1,y) ;");
    const auto trees = enumerate_parse_trees(s, "A", 3);
    REQUIRE(trees.size() == 1);
    const auto rich = rich_canonical_model(s, trees[0]);
    REQUIRE(rich);
    std::size_t diseq = 0;
    for (const auto& e : rich->graph.edges()) {
        diseq += e.label.name == kDisequalityName ? 1 : 0;
    }
    CHECK(diseq == 1);

    const Sid clash = parse_sid("alphabet b/2 ; A() <= exists y . b(y,y) * B(y) ; B(x1) <= exists y . b(x1,x1) * b(x1,y) ;");
    const auto t = enumerate_parse_trees(clash, "A", 2);
    REQUIRE(t.size() == 1);
    CHECK_FALSE(rich_canonical_model(clash, t[0]));
}

TEST_CASE("canonical models require equality-free SIDs")
{
    const Sid s = parse_sid("alphabet b/2 ; A() <= exists y z . y = z * b(y,z) ;");
    CHECK_THROWS_AS(canonical_models(s, "A", 2), Error);
    const auto m = canonical_models(fixture::productive_only(), "A", 3);
    CHECK(m.projected.size() == 2);
}

TEST_CASE("grammar translation of the mixed fixture")
{
    const Sid s = fixture::mixed();
    const auto tr = sid_to_grammar(s);
    CHECK(tr.grammar.rules.size() == s.rules.size());
    CHECK(tr.gamma.size() == s.rules.size());
    const HrRule* step = tr.grammar.find_rule(tr.gamma.at("B.0"));
    REQUIRE(step);
    CHECK_FALSE(step->productive);
    CHECK(step->parts == std::vector<std::string>{"B", "C"});
    const HrRule* c = tr.grammar.find_rule(tr.gamma.at("C.0"));
    REQUIRE(c);
    CHECK(c->productive);
    CHECK(c->graph.type() == 1);
    CHECK(c->graph.num_vertices() == 3);
    CHECK(c->graph.num_edges() == 2);

    const Sid a = fixture::productive_only();
    const HrRule* base = sid_to_grammar(a).grammar.find_rule("B.1");
    REQUIRE(base);
    CHECK(base->graph.num_vertices() == 2);
    CHECK(base->graph.num_edges() == 1);
    CHECK(base->nonterminal_edges.empty());
}

TEST_CASE("evaluated parse trees are the projected canonical models")
{
    for (const auto& name : fixture::fixture_names()) {
        const Sid s = fixture::sid(name);
        const auto tr = sid_to_grammar(s);
        for (const auto& t : enumerate_parse_trees(s, "A", 4)) {
            const CGraph value = eval_parse_tree(tr.grammar, translate_tree(tr, t));
            const auto rich = rich_canonical_model(s, t);
            REQUIRE(rich);
            CHECK(oracle::same_up_to_permutation(value, project(rich->graph, s.alphabet)));
        }
    }
}

TEST_CASE("derivations normalize back to their parse trees")
{
    for (const auto& name : fixture::fixture_names()) {
        const Sid s = fixture::sid(name);
        const auto tr = sid_to_grammar(s);
        for (const auto& t : enumerate_parse_trees(s, "A", 5)) {
            const ParseTree g = translate_tree(tr, t);
            CHECK(derivation_normalize(tr.grammar, derivation_of(tr.grammar, g)) == g);
        }
    }
}
