#ifndef SLRKIT_GRAPH_IO_HPP
#define SLRKIT_GRAPH_IO_HPP

#include <string>

#include <json.hpp>

#include "slrkit/graph.hpp"

namespace slrkit {

nlohmann::json graph_to_json(const CGraph& g);
// Throws InvalidGraph on malformed documents.
CGraph graph_from_json(const nlohmann::json& j);

std::string graph_to_dot(const CGraph& g);

CGraph read_graph_file(const std::string& path);

} // namespace slrkit

#endif
