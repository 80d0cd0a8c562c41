#ifndef SLRKIT_CANON_HPP
#define SLRKIT_CANON_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "slrkit/graph.hpp"

namespace slrkit {

struct CanonicalForm {
    // Equal keys iff isomorphic (labels, attachment order and sources respected).
    std::string key;
    // order[p] is the vertex placed at canonical position p.
    std::vector<std::size_t> order;
};

CanonicalForm canonical_form(const CGraph& g);
std::string canonical_key(const CGraph& g);

struct Isomorphism {
    // vertex_map[v] is the image in the second graph of vertex v of the first.
    std::vector<std::size_t> vertex_map;
    std::vector<std::size_t> edge_map;
};

std::optional<Isomorphism> isomorphic(const CGraph& g, const CGraph& h);
bool is_isomorphism(const CGraph& g, const CGraph& h, const Isomorphism& iso);

// Graphs up to isomorphism, iterated by (vertex count, edge count, key).
class GraphSet {
public:
    bool insert(const CGraph& g);
    bool contains(const CGraph& g) const;
    std::size_t size() const noexcept { return graphs_.size(); }
    bool empty() const noexcept { return graphs_.empty(); }
    std::vector<CGraph> graphs() const;
    std::vector<std::string> keys() const;

    friend bool operator==(const GraphSet& a, const GraphSet& b) { return a.keys() == b.keys(); }

private:
    using Order = std::tuple<std::size_t, std::size_t, std::string>;
    std::map<Order, CGraph> graphs_;
};

} // namespace slrkit

#endif
