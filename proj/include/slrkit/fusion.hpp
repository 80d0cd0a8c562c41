#ifndef SLRKIT_FUSION_HPP
#define SLRKIT_FUSION_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "slrkit/canon.hpp"
#include "slrkit/graph.hpp"

namespace slrkit {

// Partition of the vertices of one graph. Classes are numbered by first occurrence.
class VertexEquivalence {
public:
    static VertexEquivalence identity(std::size_t num_vertices);
    static VertexEquivalence from_pairs(std::size_t num_vertices,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
    static VertexEquivalence from_classes(std::vector<std::size_t> class_of);

    std::size_t size() const noexcept { return class_of_.size(); }
    std::size_t num_classes() const noexcept { return num_classes_; }
    std::size_t class_of(std::size_t v) const { return class_of_.at(v); }
    const std::vector<std::size_t>& classes() const noexcept { return class_of_; }
    bool equivalent(std::size_t u, std::size_t v) const { return class_of_.at(u) == class_of_.at(v); }
    // Least number of pairs generating the equivalence.
    std::size_t min_generators() const noexcept { return class_of_.size() - num_classes_; }
    // A generating set of exactly min_generators() pairs.
    std::vector<std::pair<std::size_t, std::size_t>> generators() const;

    friend bool operator==(const VertexEquivalence&, const VertexEquivalence&) = default;

private:
    std::vector<std::size_t> class_of_;
    std::size_t num_classes_ = 0;
};

bool compatible(const CGraph& g, const VertexEquivalence& eq);

// Throws Incompatible when compatible(g, eq) is false.
CGraph quotient(const CGraph& g, const VertexEquivalence& eq);

struct EquivalenceFilter {
    std::optional<std::size_t> max_classes;
    // Keep only equivalences with exactly this many generators.
    std::optional<std::size_t> exact_generators;
};

// Visits every compatible equivalence passing the filter; stops early when the visitor returns false.
void for_each_compatible(const CGraph& g, const EquivalenceFilter& filter,
                         const std::function<bool(const VertexEquivalence&)>& visit);

GraphSet fusion_all(const CGraph& g);
// Quotients by compatible equivalences whose minimal generating set has exactly k pairs.
GraphSet fusion_k(const CGraph& g, std::size_t k);
// Quotients with at most max_vertices vertices.
GraphSet fusion_up_to(const CGraph& g, std::size_t max_vertices);

// Splits one vertex in two copies, distributing its endpoint occurrences; keeps the
// results whose fusion of the two copies gives back g.
GraphSet fission_1(const CGraph& g);
GraphSet fission_k(const CGraph& g, std::size_t k);

std::size_t fb_of_graph(const CGraph& g);

} // namespace slrkit

#endif
