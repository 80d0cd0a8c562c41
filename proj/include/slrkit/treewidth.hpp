#ifndef SLRKIT_TREEWIDTH_HPP
#define SLRKIT_TREEWIDTH_HPP

#include <cstddef>
#include <set>
#include <vector>

#include "slrkit/graph.hpp"

namespace slrkit {

// Tree edges use the single binary label "t"; bags hold vertex indices of the decomposed graph.
struct TreeDecomposition {
    CGraph tree;
    std::vector<std::set<std::size_t>> bags;

    // Largest bag size minus one; -1 for an empty decomposition.
    long width() const;
};

inline constexpr std::size_t kTreewidthSoftLimit = 12;

// Exact tree-width by dynamic programming over elimination orderings.
// Throws TooLarge above `limit` vertices.
std::size_t treewidth_exact(const CGraph& g, std::size_t limit = kTreewidthSoftLimit);

// A decomposition of width treewidth_exact(g).
TreeDecomposition optimal_decomposition(const CGraph& g, std::size_t limit = kTreewidthSoftLimit);

bool verify_tree_decomposition(const CGraph& g, const TreeDecomposition& td);

} // namespace slrkit

#endif
