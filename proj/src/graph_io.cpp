#include "slrkit/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "slrkit/error.hpp"

namespace slrkit {

nlohmann::json graph_to_json(const CGraph& g)
{
    nlohmann::json j;
    j["type"] = g.type();
    j["vertices"] = g.vertices();
    auto edges = nlohmann::json::array();
    for (const auto& e : g.edges()) {
        std::vector<std::string> attach;
        for (std::size_t v : e.attach) {
            attach.push_back(g.vertex_id(v));
        }
        edges.push_back({{"id", e.id}, {"label", e.label.name}, {"attach", attach}});
    }
    j["edges"] = std::move(edges);
    std::vector<std::string> sources;
    for (std::size_t s : g.sources()) {
        sources.push_back(g.vertex_id(s));
    }
    j["sources"] = sources;
    return j;
}

CGraph graph_from_json(const nlohmann::json& j)
{
    try {
        CGraph g;
        for (const auto& v : j.at("vertices")) {
            g.add_vertex(v.get<std::string>());
        }
        for (const auto& e : j.at("edges")) {
            std::vector<std::size_t> attach;
            for (const auto& v : e.at("attach")) {
                auto idx = g.find_vertex(v.get<std::string>());
                if (!idx) {
                    throw Error(ErrorKind::InvalidGraph, "edge attached to unknown vertex " + v.get<std::string>());
                }
                attach.push_back(*idx);
            }
            const int arity = static_cast<int>(attach.size());
            g.add_edge(e.at("id").get<std::string>(), Label{e.at("label").get<std::string>(), arity},
                       std::move(attach));
        }
        std::vector<std::size_t> sources;
        for (const auto& s : j.value("sources", nlohmann::json::array())) {
            auto idx = g.find_vertex(s.get<std::string>());
            if (!idx) {
                throw Error(ErrorKind::InvalidGraph, "unknown source " + s.get<std::string>());
            }
            sources.push_back(*idx);
        }
        g.set_sources(std::move(sources));
        if (j.contains("type") && j.at("type").get<std::size_t>() != g.type()) {
            throw Error(ErrorKind::InvalidGraph, "type does not match the number of sources");
        }
        return g;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorKind::InvalidGraph, ex.what());
    }
}

std::string graph_to_dot(const CGraph& g)
{
    std::ostringstream out;
    out << "digraph G {\n";
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        out << "  \"" << g.vertex_id(v) << "\" [shape=circle];\n";
    }
    for (const auto& e : g.edges()) {
        out << "  \"" << e.id << "\" [shape=box,label=\"" << e.label.name << "\"];\n";
        for (std::size_t p = 0; p < e.attach.size(); ++p) {
            out << "  \"" << e.id << "\" -> \"" << g.vertex_id(e.attach[p]) << "\" [label=\"" << p + 1
                << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

CGraph read_graph_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path);
    }
    try {
        return graph_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& ex) {
        throw Error(ErrorKind::InvalidGraph, ex.what());
    }
}

} // namespace slrkit
