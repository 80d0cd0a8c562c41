#ifndef SLRKIT_TESTS_FIXTURES_HPP
#define SLRKIT_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "slrkit/graph.hpp"
#include "slrkit/slr.hpp"

namespace fixture {

inline std::string path(const std::string& name)
{
    return std::string(SLRKIT_DATA_DIR) + "/" + name;
}

inline slrkit::Sid sid(const std::string& name)
{
    return slrkit::read_sid_file(path(name));
}

// Productive rules only.
inline slrkit::Sid productive_only() { return sid("productive_only.sid"); }
// Productive and unproductive rules.
inline slrkit::Sid mixed() { return sid("mixed.sid"); }
inline slrkit::Sid mixed_rigid() { return sid("mixed_rigid.sid"); }

inline std::vector<std::string> fixture_names()
{
    return {"productive_only.sid", "mixed.sid", "mixed_rigid.sid"};
}

inline const slrkit::Label kE{"e", 2};
inline const slrkit::Label kC{"c", 1};

// e-cycle on n vertices, each vertex marked c.
inline slrkit::CGraph marked_cycle(int n)
{
    slrkit::CGraph g;
    for (int i = 0; i < n; ++i) {
        g.add_vertex("v" + std::to_string(i));
    }
    for (int i = 0; i < n; ++i) {
        g.add_edge(kE, {"v" + std::to_string(i), "v" + std::to_string((i + 1) % n)});
        g.add_edge(kC, {"v" + std::to_string(i)});
    }
    return g;
}

inline slrkit::CGraph complete_bipartite(int n, int m)
{
    slrkit::CGraph g;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            g.add_edge(kE, {"l" + std::to_string(i), "r" + std::to_string(j)});
        }
    }
    return g;
}

inline slrkit::CGraph graph_of(const std::vector<std::pair<slrkit::Label, std::vector<std::string>>>& edges)
{
    slrkit::CGraph g;
    for (const auto& [l, a] : edges) {
        g.add_edge(l, a);
    }
    return g;
}

} // namespace fixture

#endif
