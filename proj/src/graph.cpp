#include "slrkit/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "slrkit/error.hpp"

namespace slrkit {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidGraph: return "InvalidGraph";
    case ErrorKind::NotComposable: return "NotComposable";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::NotDisjoint: return "NotDisjoint";
    case ErrorKind::Incompatible: return "Incompatible";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::UndeclaredSymbol: return "UndeclaredSymbol";
    case ErrorKind::ReservedLabel: return "ReservedLabel";
    case ErrorKind::NotRegular: return "NotRegular";
    case ErrorKind::NotEqualityFree: return "NotEqualityFree";
    case ErrorKind::NotRigid: return "NotRigid";
    case ErrorKind::EmptyLanguage: return "EmptyLanguage";
    case ErrorKind::UnknownRule: return "UnknownRule";
    case ErrorKind::NonFunctionalScheme: return "NonFunctionalScheme";
    case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Label disequality_label()
{
    return Label{std::string(kDisequalityName), 2};
}

Alphabet make_alphabet(std::vector<Label> labels)
{
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].arity < 1) {
            throw Error(ErrorKind::ArityError, "label " + labels[i].name + " has arity < 1");
        }
        if (i > 0 && labels[i - 1].name == labels[i].name) {
            throw Error(ErrorKind::ArityError, "label " + labels[i].name + " declared with two arities");
        }
    }
    return labels;
}

std::optional<Label> find_label(const Alphabet& alphabet, std::string_view name)
{
    auto it = std::lower_bound(alphabet.begin(), alphabet.end(), name,
                               [](const Label& l, std::string_view n) { return l.name < n; });
    if (it != alphabet.end() && it->name == name) {
        return *it;
    }
    return std::nullopt;
}

Alphabet with_disequality(Alphabet alphabet)
{
    alphabet.push_back(disequality_label());
    return make_alphabet(std::move(alphabet));
}

std::size_t CGraph::add_vertex(std::string id)
{
    if (has_id(id)) {
        throw Error(ErrorKind::InvalidGraph, "duplicate id " + id);
    }
    const std::size_t v = vertices_.size();
    vertex_index_.emplace(id, v);
    vertices_.push_back(std::move(id));
    return v;
}

std::size_t CGraph::ensure_vertex(const std::string& id)
{
    if (auto v = find_vertex(id)) {
        return *v;
    }
    return add_vertex(id);
}

std::size_t CGraph::add_edge(std::string id, Label label, std::vector<std::size_t> attach)
{
    if (has_id(id)) {
        throw Error(ErrorKind::InvalidGraph, "duplicate id " + id);
    }
    if (label.arity < 1 || attach.size() != static_cast<std::size_t>(label.arity)) {
        throw Error(ErrorKind::InvalidGraph,
                    "edge " + id + " has " + std::to_string(attach.size()) + " attachments, label " +
                        label.name + " has arity " + std::to_string(label.arity));
    }
    for (std::size_t v : attach) {
        if (v >= vertices_.size()) {
            throw Error(ErrorKind::InvalidGraph, "edge " + id + " attaches an unknown vertex");
        }
    }
    const std::size_t e = edges_.size();
    edge_index_.emplace(id, e);
    edges_.push_back(Edge{std::move(id), std::move(label), std::move(attach)});
    return e;
}

std::size_t CGraph::add_edge(const Label& label, const std::vector<std::string>& attach_ids)
{
    std::vector<std::size_t> attach;
    attach.reserve(attach_ids.size());
    for (const auto& id : attach_ids) {
        attach.push_back(ensure_vertex(id));
    }
    std::string id;
    do {
        id = "e" + std::to_string(next_auto_id_++);
    } while (has_id(id));
    return add_edge(std::move(id), label, std::move(attach));
}

void CGraph::set_sources(std::vector<std::size_t> sources)
{
    std::set<std::size_t> seen;
    for (std::size_t v : sources) {
        if (v >= vertices_.size()) {
            throw Error(ErrorKind::InvalidGraph, "source is not a vertex");
        }
        if (!seen.insert(v).second) {
            throw Error(ErrorKind::InvalidGraph, "sources are not injective");
        }
    }
    sources_ = std::move(sources);
}

std::optional<std::size_t> CGraph::find_vertex(std::string_view id) const
{
    auto it = vertex_index_.find(std::string(id));
    if (it == vertex_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<std::size_t> CGraph::find_edge(std::string_view id) const
{
    auto it = edge_index_.find(std::string(id));
    if (it == edge_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool CGraph::has_id(std::string_view id) const
{
    const std::string key(id);
    return vertex_index_.count(key) != 0 || edge_index_.count(key) != 0;
}

std::string CGraph::fresh_id(std::string_view prefix) const
{
    std::string base(prefix);
    if (!has_id(base)) {
        return base;
    }
    for (std::size_t i = 1;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!has_id(candidate)) {
            return candidate;
        }
    }
}

Alphabet CGraph::labels() const
{
    std::vector<Label> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) {
        out.push_back(e.label);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<bool> CGraph::touched() const
{
    std::vector<bool> out(vertices_.size(), false);
    for (const auto& e : edges_) {
        for (std::size_t v : e.attach) {
            out[v] = true;
        }
    }
    return out;
}

std::vector<std::size_t> CGraph::degrees() const
{
    std::vector<std::size_t> out(vertices_.size(), 0);
    for (const auto& e : edges_) {
        for (std::size_t v : e.attach) {
            ++out[v];
        }
    }
    return out;
}

bool is_simple(const CGraph& g)
{
    std::set<std::pair<std::string, std::vector<std::size_t>>> seen;
    for (const auto& e : g.edges()) {
        if (!seen.emplace(e.label.name, e.attach).second) {
            return false;
        }
    }
    return true;
}

namespace {

std::vector<std::string> attach_ids(const CGraph& g, const Edge& e)
{
    std::vector<std::string> ids;
    ids.reserve(e.attach.size());
    for (std::size_t v : e.attach) {
        ids.push_back(g.vertex_id(v));
    }
    return ids;
}

} // namespace

CGraph compose(const CGraph& g1, const CGraph& g2)
{
    if (g1.type() != 0 || g2.type() != 0) {
        throw Error(ErrorKind::TypeMismatch, "composition requires type-0 graphs");
    }
    CGraph out = g1;
    std::set<std::pair<std::string, std::vector<std::string>>> tuples;
    for (const auto& e : g1.edges()) {
        tuples.emplace(e.label.name, attach_ids(g1, e));
    }
    for (const auto& v : g2.vertices()) {
        if (g1.find_edge(v)) {
            throw Error(ErrorKind::NotComposable, "id " + v + " is an edge of the left operand");
        }
        out.ensure_vertex(v);
    }
    for (const auto& e : g2.edges()) {
        if (g1.has_id(e.id)) {
            throw Error(ErrorKind::NotComposable, "edge id " + e.id + " occurs in both operands");
        }
        auto ids = attach_ids(g2, e);
        if (!tuples.emplace(e.label.name, ids).second) {
            throw Error(ErrorKind::NotComposable,
                        "two " + e.label.name + "-edges with the same attachments");
        }
        std::vector<std::size_t> attach;
        for (const auto& id : ids) {
            attach.push_back(*out.find_vertex(id));
        }
        out.add_edge(e.id, e.label, std::move(attach));
    }
    return out;
}

CGraph parallel(const CGraph& g1, const CGraph& g2, std::size_t n)
{
    if (g1.type() != n || g2.type() != n) {
        throw Error(ErrorKind::TypeMismatch, "parallel composition expects two graphs of type " +
                                                 std::to_string(n));
    }
    CGraph out = g1;
    std::vector<std::size_t> map(g2.num_vertices(), 0);
    std::vector<bool> is_source(g2.num_vertices(), false);
    for (std::size_t i = 0; i < n; ++i) {
        map[g2.sources()[i]] = g1.sources()[i];
        is_source[g2.sources()[i]] = true;
    }
    for (std::size_t v = 0; v < g2.num_vertices(); ++v) {
        if (g1.has_id(g2.vertex_id(v))) {
            throw Error(ErrorKind::NotDisjoint, "id " + g2.vertex_id(v) + " occurs in both operands");
        }
        if (!is_source[v]) {
            map[v] = out.add_vertex(g2.vertex_id(v));
        }
    }
    for (const auto& e : g2.edges()) {
        if (g1.has_id(e.id)) {
            throw Error(ErrorKind::NotDisjoint, "id " + e.id + " occurs in both operands");
        }
        std::vector<std::size_t> attach;
        for (std::size_t v : e.attach) {
            attach.push_back(map[v]);
        }
        out.add_edge(e.id, e.label, std::move(attach));
    }
    return out;
}

CGraph source_graph(std::size_t n)
{
    CGraph out;
    std::vector<std::size_t> sources;
    for (std::size_t i = 0; i < n; ++i) {
        sources.push_back(out.add_vertex("s" + std::to_string(i + 1)));
    }
    out.set_sources(std::move(sources));
    return out;
}

CGraph substitute(const CGraph& g, std::string_view edge_id, const CGraph& h)
{
    auto target = g.find_edge(edge_id);
    if (!target) {
        throw Error(ErrorKind::InvalidGraph, "no edge " + std::string(edge_id));
    }
    const Edge& replaced = g.edge(*target);
    if (h.type() != replaced.attach.size()) {
        throw Error(ErrorKind::ArityMismatch, "edge " + replaced.id + " has arity " +
                                                  std::to_string(replaced.attach.size()) +
                                                  ", replacement has type " +
                                                  std::to_string(h.type()));
    }
    for (const auto& v : h.vertices()) {
        if (g.has_id(v)) {
            throw Error(ErrorKind::NotDisjoint, "id " + v + " occurs in both graphs");
        }
    }
    for (const auto& e : h.edges()) {
        if (g.has_id(e.id)) {
            throw Error(ErrorKind::NotDisjoint, "id " + e.id + " occurs in both graphs");
        }
    }

    CGraph out;
    for (const auto& v : g.vertices()) {
        out.add_vertex(v);
    }
    for (const auto& e : g.edges()) {
        if (e.id != replaced.id) {
            out.add_edge(e.id, e.label, e.attach);
        }
    }
    std::vector<std::size_t> map(h.num_vertices(), 0);
    std::vector<bool> joined(h.num_vertices(), false);
    for (std::size_t i = 0; i < h.type(); ++i) {
        map[h.sources()[i]] = replaced.attach[i];
        joined[h.sources()[i]] = true;
    }
    for (std::size_t v = 0; v < h.num_vertices(); ++v) {
        if (!joined[v]) {
            map[v] = out.add_vertex(h.vertex_id(v));
        }
    }
    for (const auto& e : h.edges()) {
        std::vector<std::size_t> attach;
        for (std::size_t v : e.attach) {
            attach.push_back(map[v]);
        }
        out.add_edge(e.id, e.label, std::move(attach));
    }
    out.set_sources(g.sources());
    return out;
}

CGraph project(const CGraph& g, const Alphabet& alphabet)
{
    CGraph out;
    for (const auto& v : g.vertices()) {
        out.add_vertex(v);
    }
    for (const auto& e : g.edges()) {
        if (find_label(alphabet, e.label.name)) {
            out.add_edge(e.id, e.label, e.attach);
        }
    }
    out.set_sources(g.sources());
    return out;
}

CGraph prefix_ids(const CGraph& g, std::string_view prefix)
{
    const std::string p(prefix);
    CGraph out;
    for (const auto& v : g.vertices()) {
        out.add_vertex(p + v);
    }
    for (const auto& e : g.edges()) {
        out.add_edge(p + e.id, e.label, e.attach);
    }
    out.set_sources(g.sources());
    return out;
}

CGraph permute_vertices(const CGraph& g, const std::vector<std::size_t>& order)
{
    if (order.size() != g.num_vertices()) {
        throw Error(ErrorKind::InvalidGraph, "permutation size mismatch");
    }
    std::vector<std::size_t> inverse(order.size(), 0);
    CGraph out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        inverse[order[i]] = i;
        out.add_vertex(g.vertex_id(order[i]));
    }
    for (const auto& e : g.edges()) {
        std::vector<std::size_t> attach;
        for (std::size_t v : e.attach) {
            attach.push_back(inverse[v]);
        }
        out.add_edge(e.id, e.label, std::move(attach));
    }
    std::vector<std::size_t> sources;
    for (std::size_t s : g.sources()) {
        sources.push_back(inverse[s]);
    }
    out.set_sources(std::move(sources));
    return out;
}

} // namespace slrkit
