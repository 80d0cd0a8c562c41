#ifndef SLRKIT_GRAPH_HPP
#define SLRKIT_GRAPH_HPP

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace slrkit {

struct Label {
    std::string name;
    int arity = 1;

    friend bool operator==(const Label&, const Label&) = default;
    friend auto operator<=>(const Label&, const Label&) = default;
};

// Binary label recording a disequality between its two endpoints.
inline constexpr std::string_view kDisequalityName = "d__";
Label disequality_label();

// Sorted by name; names unique.
using Alphabet = std::vector<Label>;

Alphabet make_alphabet(std::vector<Label> labels);
std::optional<Label> find_label(const Alphabet& alphabet, std::string_view name);
Alphabet with_disequality(Alphabet alphabet);

struct Edge {
    std::string id;
    Label label;
    std::vector<std::size_t> attach;
};

// Concrete hypergraph. Vertices and edges are addressed by dense indices and
// carry opaque string ids; vertex and edge ids share one namespace.
class CGraph {
public:
    CGraph() = default;

    std::size_t add_vertex(std::string id);
    // Returns the index of `id`, adding the vertex if absent.
    std::size_t ensure_vertex(const std::string& id);
    std::size_t add_edge(std::string id, Label label, std::vector<std::size_t> attach);
    // Adds an edge with a generated id, creating missing vertices by id.
    std::size_t add_edge(const Label& label, const std::vector<std::string>& attach_ids);
    void set_sources(std::vector<std::size_t> sources);

    std::size_t type() const noexcept { return sources_.size(); }
    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    const std::vector<std::string>& vertices() const noexcept { return vertices_; }
    const std::string& vertex_id(std::size_t v) const { return vertices_.at(v); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t e) const { return edges_.at(e); }
    const std::vector<std::size_t>& sources() const noexcept { return sources_; }

    std::optional<std::size_t> find_vertex(std::string_view id) const;
    std::optional<std::size_t> find_edge(std::string_view id) const;
    bool has_id(std::string_view id) const;
    std::string fresh_id(std::string_view prefix) const;

    // Labels occurring on edges, sorted and unique.
    Alphabet labels() const;
    // Vertices attached to at least one edge.
    std::vector<bool> touched() const;
    std::vector<std::size_t> degrees() const;

private:
    std::vector<std::string> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> sources_;
    std::unordered_map<std::string, std::size_t> vertex_index_;
    std::unordered_map<std::string, std::size_t> edge_index_;
    std::size_t next_auto_id_ = 0;
};

bool is_simple(const CGraph& g);

// Vertex-sharing union of two type-0 c-graphs.
CGraph compose(const CGraph& g1, const CGraph& g2);

// Disjoint union joining the i-th sources; the result keeps the ids of g1's sources.
CGraph parallel(const CGraph& g1, const CGraph& g2, std::size_t n);

// n isolated vertices, all sources; unit of parallel(., ., n).
CGraph source_graph(std::size_t n);

// G[e/H]: deletes e and joins its i-th attachment with the i-th source of H.
CGraph substitute(const CGraph& g, std::string_view edge_id, const CGraph& h);

// Drops edges whose label is not in the alphabet; vertices and sources are kept.
CGraph project(const CGraph& g, const Alphabet& alphabet);

// Copy with every vertex and edge id prefixed.
CGraph prefix_ids(const CGraph& g, std::string_view prefix);

// Copy with vertices listed in the order `order[new] = old`.
CGraph permute_vertices(const CGraph& g, const std::vector<std::size_t>& order);

} // namespace slrkit

#endif
