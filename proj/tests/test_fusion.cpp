#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "slrkit/error.hpp"
#include "slrkit/fusion.hpp"
#include "slrkit/treewidth.hpp"

using namespace slrkit;

namespace {

const Label kB{"b", 2};
const Label kA{"a", 1};
const Alphabet kAB = make_alphabet({kA, kB});

std::size_t fb_oracle(const CGraph& g)
{
    std::size_t best = 0;
    for (const auto& p : oracle::set_partitions(g.num_vertices())) {
        if (oracle::quotient_by(g, p)) {
            const std::size_t blocks = p.empty() ? 0 : *std::max_element(p.begin(), p.end()) + 1;
            best = std::max(best, g.num_vertices() - blocks);
        }
    }
    return best;
}

} // namespace

TEST_CASE("vertex equivalences count generators")
{
    const auto eq = VertexEquivalence::from_pairs(5, {{0, 1}, {1, 2}, {3, 4}});
    CHECK(eq.num_classes() == 2);
    CHECK(eq.min_generators() == 3);
    CHECK(eq.generators().size() == 3);
    CHECK(VertexEquivalence::from_pairs(5, eq.generators()) == eq);
    CHECK(VertexEquivalence::identity(3).min_generators() == 0);
}

TEST_CASE("quotients reject collapsing edges and disequalities")
{
    CGraph g;
    const auto u = g.add_vertex("u");
    const auto v = g.add_vertex("v");
    const auto w = g.add_vertex("w");
    g.add_edge("e1", kB, {u, v});
    g.add_edge("e2", kB, {w, v});
    g.add_edge("d", disequality_label(), {u, v});
    CHECK_FALSE(compatible(g, VertexEquivalence::from_pairs(3, {{0, 2}})));
    CHECK_FALSE(compatible(g, VertexEquivalence::from_pairs(3, {{0, 1}})));
    CHECK(compatible(g, VertexEquivalence::from_pairs(3, {{1, 2}})));
    CHECK_THROWS_AS(quotient(g, VertexEquivalence::from_pairs(3, {{0, 2}})), Error);
    CHECK(quotient(g, VertexEquivalence::from_pairs(3, {{1, 2}})).num_vertices() == 2);
}

TEST_CASE("fusions agree with the set-partition oracle")
{
    std::mt19937 rng(5);
    for (int i = 0; i < 40; ++i) {
        const CGraph g = oracle::random_simple_graph(rng, kAB, 5, 5);
        CHECK(oracle::same_classes(fusion_all(g).graphs(), oracle::fusions(g)));
        CHECK(oracle::same_classes(fusion_up_to(g, 2).graphs(), oracle::fusions(g, 2)));
        CHECK(fb_of_graph(g) == fb_oracle(g));
    }
}

TEST_CASE("fusions split by generator count")
{
    std::mt19937 rng(8);
    for (int i = 0; i < 20; ++i) {
        const CGraph g = oracle::random_simple_graph(rng, kAB, 5, 4);
        std::vector<CGraph> all;
        for (std::size_t k = 0; k <= g.num_vertices(); ++k) {
            for (const auto& h : fusion_k(g, k).graphs()) {
                CHECK(h.num_vertices() + k == g.num_vertices());
                all.push_back(h);
            }
        }
        CHECK(oracle::same_classes(all, fusion_all(g).graphs()));
    }
}

TEST_CASE("single fissions agree with the oracle and fuse back")
{
    std::mt19937 rng(9);
    for (int i = 0; i < 40; ++i) {
        const CGraph g = oracle::random_simple_graph(rng, kAB, 4, 4);
        const auto split = fission_1(g).graphs();
        CHECK(oracle::same_classes(split, oracle::fissions(g)));
        for (const auto& h : split) {
            CHECK(fusion_k(h, 1).contains(g));
        }
    }
}

TEST_CASE("k-fold fission iterates single fissions")
{
    const CGraph g = [] {
        CGraph h;
        h.add_edge(kB, {"u", "v"});
        h.add_edge(kB, {"v", "w"});
        return h;
    }();
    const auto twice = fission_k(g, 2);
    for (const auto& h : twice.graphs()) {
        CHECK(h.num_vertices() == 5);
    }
    CHECK(fission_k(g, 0).size() == 1);
}

TEST_CASE("fusion bound of small graphs")
{
    CGraph single;
    single.add_edge(kB, {"u", "v"});
    CHECK(fb_of_graph(single) == 1);
    CGraph both;
    both.add_edge(kB, {"u", "v"});
    both.add_edge(kB, {"v", "u"});
    CHECK(fb_of_graph(both) == 0);
    CHECK(fb_of_graph(CGraph{}) == 0);
}

TEST_CASE("exact tree-width agrees with all elimination orders")
{
    std::mt19937 rng(13);
    for (int i = 0; i < 40; ++i) {
        const CGraph g = oracle::random_simple_graph(rng, kAB, 7, 12);
        const std::size_t tw = treewidth_exact(g);
        CHECK(tw == oracle::treewidth_all_orders(g));
        const auto td = optimal_decomposition(g);
        CHECK(verify_tree_decomposition(g, td));
        CHECK(td.width() == static_cast<long>(tw));
    }
}

TEST_CASE("tree-width of named graphs")
{
    CGraph path;
    path.add_edge(kB, {"1", "2"});
    path.add_edge(kB, {"2", "3"});
    CHECK(treewidth_exact(path) == 1);
    CGraph ring = path;
    ring.add_edge(kB, {"3", "1"});
    CHECK(treewidth_exact(ring) == 2);
    CGraph k4;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            k4.add_edge(kB, {std::to_string(i), std::to_string(j)});
        }
    }
    CHECK(treewidth_exact(k4) == 3);
    CGraph hyper;
    hyper.add_edge(Label{"t", 3}, {"x", "y", "z"});
    CHECK(treewidth_exact(hyper) == 2);
}
