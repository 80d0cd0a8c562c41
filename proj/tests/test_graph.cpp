#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "slrkit/canon.hpp"
#include "slrkit/error.hpp"
#include "slrkit/graph.hpp"
#include "slrkit/graph_io.hpp"

using namespace slrkit;

namespace {

const Label kB{"b", 2};
const Label kA{"a", 1};
const Alphabet kAB = make_alphabet({kA, kB});

CGraph typed_edge(const std::string& prefix)
{
    CGraph g;
    const auto s1 = g.add_vertex(prefix + "s1");
    const auto s2 = g.add_vertex(prefix + "s2");
    g.add_edge(prefix + "e", kB, {s1, s2});
    g.set_sources({s1, s2});
    return g;
}

} // namespace

TEST_CASE("compose shares vertices by id and rejects duplicate tuples")
{
    const CGraph g1 = fixture::graph_of({{kB, {"u", "v"}}});
    CGraph g2;
    g2.add_edge("f", kB, {g2.add_vertex("v"), g2.add_vertex("w")});
    const CGraph g = compose(g1, g2);
    CHECK(g.num_vertices() == 3);
    CHECK(g.num_edges() == 2);

    CGraph dup;
    dup.add_edge("f", kB, {dup.add_vertex("u"), dup.add_vertex("v")});
    CHECK_THROWS_AS(compose(g1, dup), Error);
}

TEST_CASE("parallel composition joins sources position-wise")
{
    const CGraph g = parallel(typed_edge("x"), typed_edge("y"), 2);
    CHECK(g.num_vertices() == 2);
    CHECK(g.num_edges() == 2);
    CHECK(g.type() == 2);
    CHECK(g.vertex_id(g.sources()[0]) == "xs1");
    CHECK_THROWS_AS(parallel(typed_edge("x"), typed_edge("x"), 2), Error);
    CHECK_THROWS_AS(parallel(typed_edge("x"), source_graph(1), 2), Error);
}

TEST_CASE("source graph is a unit of parallel composition")
{
    std::mt19937 rng(7);
    for (int i = 0; i < 20; ++i) {
        CGraph g = oracle::random_simple_graph(rng, kAB, 4, 4);
        std::vector<std::size_t> sources;
        for (std::size_t v = 0; v < std::min<std::size_t>(2, g.num_vertices()); ++v) {
            sources.push_back(v);
        }
        g.set_sources(sources);
        const CGraph p = parallel(g, source_graph(sources.size()), sources.size());
        CHECK(oracle::same_up_to_permutation(p, g));
    }
}

TEST_CASE("substitution replaces an edge by a typed graph")
{
    const CGraph g = fixture::graph_of({{kB, {"u", "v"}}, {kA, {"u"}}});
    CGraph h;
    const auto s1 = h.add_vertex("p");
    const auto s2 = h.add_vertex("q");
    const auto mid = h.add_vertex("m");
    h.add_edge("h1", kB, {s1, mid});
    h.add_edge("h2", kB, {mid, s2});
    h.set_sources({s1, s2});
    const CGraph r = substitute(g, g.edge(0).id, h);
    CHECK(r.num_vertices() == 3);
    CHECK(r.num_edges() == 3);
    CHECK_FALSE(r.find_edge(g.edge(0).id));
    CHECK_THROWS_AS(substitute(g, "missing", h), Error);
    CHECK_THROWS_AS(substitute(g, g.edge(1).id, h), Error);
}

TEST_CASE("projection drops labels outside the alphabet and keeps vertices")
{
    const CGraph g = fixture::graph_of({{kB, {"u", "v"}}, {kA, {"w"}}});
    const CGraph p = project(g, make_alphabet({kB}));
    CHECK(p.num_vertices() == 3);
    CHECK(p.num_edges() == 1);
}

TEST_CASE("simple graphs have distinct labelled tuples")
{
    CGraph g;
    const auto u = g.add_vertex("u");
    const auto v = g.add_vertex("v");
    g.add_edge("e1", kB, {u, v});
    CHECK(is_simple(g));
    g.add_edge("e2", kB, {u, v});
    CHECK_FALSE(is_simple(g));
}

TEST_CASE("canonical keys agree with the permutation oracle")
{
    std::mt19937 rng(11);
    std::vector<CGraph> pool;
    for (int i = 0; i < 60; ++i) {
        pool.push_back(oracle::random_simple_graph(rng, kAB, 5, 5));
    }
    for (const auto& g : pool) {
        std::vector<std::size_t> order(g.num_vertices());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        const CGraph h = permute_vertices(g, order);
        CHECK(canonical_key(g) == canonical_key(h));
        const auto iso = isomorphic(g, h);
        REQUIRE(iso);
        CHECK(is_isomorphism(g, h, *iso));
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            CHECK((canonical_key(pool[i]) == canonical_key(pool[j])) == oracle::same_up_to_permutation(pool[i], pool[j]));
        }
    }
}

TEST_CASE("canonical keys respect source order")
{
    CGraph g = typed_edge("x");
    CGraph h = g;
    h.set_sources({g.sources()[1], g.sources()[0]});
    CHECK(canonical_key(g) != canonical_key(h));
    CHECK_FALSE(isomorphic(g, h));
}

TEST_CASE("graph set deduplicates isomorphic graphs")
{
    GraphSet s;
    CHECK(s.insert(fixture::graph_of({{kB, {"u", "v"}}})));
    CHECK_FALSE(s.insert(fixture::graph_of({{kB, {"x", "y"}}})));
    CHECK(s.insert(fixture::graph_of({{kB, {"x", "x"}}})));
    CHECK(s.size() == 2);
}

TEST_CASE("interchange JSON round-trips")
{
    std::mt19937 rng(3);
    for (int i = 0; i < 20; ++i) {
        CGraph g = oracle::random_simple_graph(rng, kAB, 4, 4);
        g.set_sources({0});
        const CGraph back = graph_from_json(graph_to_json(g));
        CHECK(graph_to_json(back) == graph_to_json(g));
    }
    CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(R"({"vertices":["a"],"edges":[{"id":"e","label":"b","attach":["z"]}]})")),
                    Error);
    CHECK(graph_to_dot(typed_edge("x")).find("xs1") != std::string::npos);
}
