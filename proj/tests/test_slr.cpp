#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "slrkit/error.hpp"
#include "slrkit/slr.hpp"
#include "slrkit/slr_semantics.hpp"

using namespace slrkit;

namespace {

const SlrFormula kRootA = SlrFormula::pred("A", {});

GraphSet with_at_most_edges(const GraphSet& s, std::size_t m)
{
    GraphSet out;
    for (const auto& g : s.graphs()) {
        if (g.num_edges() <= m) {
            out.insert(g);
        }
    }
    return out;
}

// Generate-and-test: every simple graph without isolated vertices checked against A.
GraphSet models_by_testing(const Sid& sid, std::size_t n, std::size_t max_edges)
{
    GraphSet out;
    for (std::size_t k = 1; k <= n; ++k) {
        for (const auto& g : oracle::all_simple_graphs(sid.alphabet, k, max_edges)) {
            const auto t = g.touched();
            if (std::find(t.begin(), t.end(), false) != t.end()) {
                continue;
            }
            if (slr_models(g, {}, kRootA, sid) == Verdict::True) {
                out.insert(g);
            }
        }
    }
    return out;
}

// Every existential occurs in a relation atom of its rule.
const char* kWithEqualities[] = {
    "alphabet b/2 ; A() <= exists y z . y = z * b(y,z) ;",
    "alphabet c/1, b/2 ; A() <= exists y z . b(y,z) * B(y,z) ; A() <= exists y . B(y,y) ; "
    "B(x1,x2) <= x1 = x2 * c(x1) ; B(x1,x2) <= exists y . b(x1,y) * c(x2) * x1 != x2 ;",
    "alphabet b/2, c/2 ; A() <= exists y z . B(y,z) * b(z,z) ; B(x1,x2) <= exists u . x1 = u * c(u,x2) * C(u,x2) ; "
    "C(x1,x2) <= x1 = x2 ; C(x1,x2) <= b(x1,x2) ;",
};

} // namespace

TEST_CASE("SID text round-trips through the printer")
{
    for (const auto& name : fixture::fixture_names()) {
        const Sid s = fixture::sid(name);
        CHECK(print_sid(parse_sid(print_sid(s))) == print_sid(s));
    }
    const Sid a = fixture::productive_only();
    CHECK(a.rules.size() == 3);
    CHECK(a.arity("A") == 0);
    CHECK(a.arity("B") == 2);
    CHECK(a.rules[2].id == "B.1");
}

TEST_CASE("SID parser reports malformed input")
{
    CHECK_THROWS_AS(parse_sid("alphabet b/2 ; A() <= c(x1) ;"), Error);
    CHECK_THROWS_AS(parse_sid("alphabet b/2 ; A() <= b(y,y) ;"), Error);
    CHECK_THROWS_AS(parse_sid("alphabet b/2 ; A() <= exists y . b(y) ;"), Error);
    CHECK_THROWS_AS(parse_sid("alphabet b/2 ; A() <= exists y . B(y) ;"), Error);
    CHECK_THROWS_AS(parse_sid("alphabet b/2 ; A() <= exists y . b(y,y)"), Error);
    CHECK_THROWS_AS(read_sid_file(fixture::path("missing.sid")), Error);
}

TEST_CASE("quantifier-free satisfiability builds canonical models")
{
    const Sid ctx = parse_sid("alphabet b/2, c/2 ;");
    auto sat = sat_qpf(parse_slr_formula("b(x,y) * x = z * c(z,y)", ctx, {"x", "y", "z"}));
    REQUIRE(sat);
    CHECK(sat->first.num_vertices() == 2);
    CHECK(sat->first.num_edges() == 2);
    CHECK(sat->second.at("x") == sat->second.at("z"));
    CHECK_FALSE(sat_qpf(parse_slr_formula("b(x,y) * b(x,y)", ctx, {"x", "y"})));
    CHECK_FALSE(sat_qpf(parse_slr_formula("b(x,y) * x != x", ctx, {"x", "y"})));
    CHECK_FALSE(sat_qpf(parse_slr_formula("b(x,y) * x = y * x != y", ctx, {"x", "y"})));
    CHECK(sat_qpf(parse_slr_formula("b(x,y) * x != y", ctx, {"x", "y"})));
}

TEST_CASE("model checking on the fixtures")
{
    const Sid a = fixture::productive_only();
    const CGraph base = fixture::graph_of({{Label{"b", 2}, {"1", "2"}},
                                           {Label{"c", 2}, {"3", "2"}},
                                           {Label{"b", 2}, {"1", "3"}}});
    CHECK(slr_models(base, {}, kRootA, a) == Verdict::True);
    CHECK(slr_unfoldings(base, {}, kRootA, a) == 2);
    const CGraph broken = fixture::graph_of({{Label{"b", 2}, {"1", "2"}}, {Label{"c", 2}, {"3", "2"}}});
    CHECK(slr_models(broken, {}, kRootA, a) == Verdict::FalseAtFuel);
    CHECK(slr_models(base, {}, kRootA, a, 0) == Verdict::FalseAtFuel);
}

TEST_CASE("fixpoint model enumeration agrees with generate-and-test")
{
    for (const auto& name : fixture::fixture_names()) {
        const Sid s = fixture::sid(name);
        const GraphSet fix = with_at_most_edges(enumerate_models_bruteforce(s, "A", 3), 4);
        CHECK(fix == models_by_testing(s, 3, 4));
        for (const auto& g : enumerate_models_bruteforce(s, "A", 4).graphs()) {
            CHECK(slr_models(g, {}, kRootA, s) == Verdict::True);
        }
    }
}

TEST_CASE("equality elimination preserves models")
{
    for (const char* text : kWithEqualities) {
        const Sid s = parse_sid(text);
        CHECK_FALSE(is_equality_free(s));
        const Sid e = equality_eliminate(s);
        CHECK(is_equality_free(e));
        for (std::size_t n = 1; n <= 3; ++n) {
            CHECK(enumerate_models_bruteforce(s, "A", n) == enumerate_models_bruteforce(e, "A", n));
        }
    }
    for (const auto& name : fixture::fixture_names()) {
        CHECK(is_equality_free(fixture::sid(name)));
    }
}

TEST_CASE("prenex bodies and free variables")
{
    const Sid a = fixture::productive_only();
    const auto p = prenex_body(a.rules[0].body);
    REQUIRE(p);
    CHECK(p->exists.size() == 3);
    CHECK(p->atoms.size() == 3);
    CHECK(free_vars(a.rules[1].body) == std::set<std::string>{"x1", "x2"});
}
