#include "slrkit/treewidth.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

#include "slrkit/error.hpp"

namespace slrkit {

long TreeDecomposition::width() const
{
    std::size_t largest = 0;
    for (const auto& b : bags) {
        largest = std::max(largest, b.size());
    }
    return largest == 0 ? 0 : static_cast<long>(largest) - 1;
}

namespace {

using Mask = std::uint32_t;

std::vector<Mask> primal_adjacency(const CGraph& g)
{
    std::vector<Mask> adj(g.num_vertices(), 0);
    for (const auto& e : g.edges()) {
        for (std::size_t u : e.attach) {
            for (std::size_t v : e.attach) {
                if (u != v) {
                    adj[u] |= Mask{1} << v;
                }
            }
        }
    }
    return adj;
}

// Vertices outside `eliminated` and distinct from v reachable from v through `eliminated`.
Mask reach_set(const std::vector<Mask>& adj, Mask eliminated, std::size_t v)
{
    Mask seen = Mask{1} << v;
    Mask frontier = seen;
    Mask result = 0;
    while (frontier != 0) {
        Mask next = 0;
        for (std::size_t u = 0; u < adj.size(); ++u) {
            if ((frontier >> u) & 1U) {
                next |= adj[u];
            }
        }
        next &= ~seen;
        seen |= next;
        result |= next & ~eliminated;
        frontier = next & eliminated;
    }
    return result;
}

struct Solution {
    std::size_t width;
    std::vector<std::size_t> order;
};

Solution solve(const CGraph& g, std::size_t limit)
{
    const std::size_t n = g.num_vertices();
    if (n > limit || n > 24) {
        throw Error(ErrorKind::TooLarge, "tree-width limited to " + std::to_string(limit) + " vertices");
    }
    if (n == 0) {
        return {0, {}};
    }
    const auto adj = primal_adjacency(g);
    const std::size_t states = std::size_t{1} << n;
    constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> best(states, kUnset);
    std::vector<std::uint8_t> last(states, 0);
    best[0] = 0;
    for (Mask s = 1; s < states; ++s) {
        for (std::size_t v = 0; v < n; ++v) {
            if (!((s >> v) & 1U)) {
                continue;
            }
            const Mask rest = s & ~(Mask{1} << v);
            const auto q = static_cast<std::size_t>(__builtin_popcount(reach_set(adj, rest, v)));
            const std::size_t cost = std::max(best[rest], q);
            if (cost < best[s]) {
                best[s] = cost;
                last[s] = static_cast<std::uint8_t>(v);
            }
        }
    }
    Solution out{best[states - 1], {}};
    for (Mask s = static_cast<Mask>(states - 1); s != 0;) {
        out.order.push_back(last[s]);
        s &= ~(Mask{1} << last[s]);
    }
    std::reverse(out.order.begin(), out.order.end());
    return out;
}

} // namespace

std::size_t treewidth_exact(const CGraph& g, std::size_t limit)
{
    return solve(g, limit).width;
}

TreeDecomposition optimal_decomposition(const CGraph& g, std::size_t limit)
{
    const auto sol = solve(g, limit);
    const std::size_t n = g.num_vertices();
    TreeDecomposition td;
    if (n == 0) {
        td.tree.add_vertex("n0");
        td.bags.emplace_back();
        return td;
    }
    const auto adj = primal_adjacency(g);
    std::vector<std::size_t> rank(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        rank[sol.order[i]] = i;
    }
    const Label tree_label{"t", 2};
    Mask eliminated = 0;
    std::optional<std::size_t> previous_root;
    for (std::size_t i = 0; i < n; ++i) {
        td.tree.add_vertex("n" + std::to_string(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t v = sol.order[i];
        const Mask q = reach_set(adj, eliminated, v);
        std::set<std::size_t> bag{v};
        std::size_t parent = n;
        for (std::size_t u = 0; u < n; ++u) {
            if ((q >> u) & 1U) {
                bag.insert(u);
                if (parent == n || rank[u] < rank[parent]) {
                    parent = u;
                }
            }
        }
        td.bags.push_back(std::move(bag));
        if (parent != n) {
            td.tree.add_edge("t" + std::to_string(i), tree_label, {i, rank[parent]});
        } else {
            if (previous_root) {
                td.tree.add_edge("t" + std::to_string(i), tree_label, {i, *previous_root});
            }
            previous_root = i;
        }
        eliminated |= Mask{1} << v;
    }
    return td;
}

bool verify_tree_decomposition(const CGraph& g, const TreeDecomposition& td)
{
    const std::size_t nodes = td.tree.num_vertices();
    if (nodes == 0 || td.bags.size() != nodes || td.tree.num_edges() + 1 != nodes) {
        return false;
    }
    std::vector<std::vector<std::size_t>> tree_adj(nodes);
    for (const auto& e : td.tree.edges()) {
        if (e.attach.size() != 2 || e.attach[0] == e.attach[1]) {
            return false;
        }
        tree_adj[e.attach[0]].push_back(e.attach[1]);
        tree_adj[e.attach[1]].push_back(e.attach[0]);
    }
    // Connected in the subtree induced by `keep`, starting from any kept node.
    auto connected = [&](const std::vector<bool>& keep) {
        std::size_t total = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
        if (total == 0) {
            return false;
        }
        std::size_t start = static_cast<std::size_t>(std::find(keep.begin(), keep.end(), true) - keep.begin());
        std::vector<bool> seen(nodes, false);
        std::vector<std::size_t> stack{start};
        seen[start] = true;
        std::size_t count = 0;
        while (!stack.empty()) {
            std::size_t x = stack.back();
            stack.pop_back();
            ++count;
            for (std::size_t y : tree_adj[x]) {
                if (keep[y] && !seen[y]) {
                    seen[y] = true;
                    stack.push_back(y);
                }
            }
        }
        return count == total;
    };
    if (!connected(std::vector<bool>(nodes, true))) {
        return false;
    }
    for (const auto& bag : td.bags) {
        for (std::size_t v : bag) {
            if (v >= g.num_vertices()) {
                return false;
            }
        }
    }
    for (const auto& e : g.edges()) {
        bool covered = std::any_of(td.bags.begin(), td.bags.end(), [&](const auto& bag) {
            return std::all_of(e.attach.begin(), e.attach.end(),
                               [&](std::size_t v) { return bag.count(v) != 0; });
        });
        if (!covered) {
            return false;
        }
    }
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        std::vector<bool> keep(nodes);
        for (std::size_t i = 0; i < nodes; ++i) {
            keep[i] = td.bags[i].count(v) != 0;
        }
        if (!connected(keep)) {
            return false;
        }
    }
    return true;
}

} // namespace slrkit
