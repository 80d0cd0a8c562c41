#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>

#include "slrkit/grammar.hpp"
#include "slrkit/regular.hpp"

namespace oracle {

namespace {

using Tuple = std::pair<std::string, std::vector<std::size_t>>;

std::multiset<Tuple> edge_tuples(const CGraph& g, const std::vector<std::size_t>& map)
{
    std::multiset<Tuple> out;
    for (const auto& e : g.edges()) {
        std::vector<std::size_t> a;
        for (std::size_t v : e.attach) {
            a.push_back(map[v]);
        }
        out.emplace(e.label.name, std::move(a));
    }
    return out;
}

} // namespace

bool same_up_to_permutation(const CGraph& g, const CGraph& h)
{
    if (g.num_vertices() != h.num_vertices() || g.num_edges() != h.num_edges() || g.type() != h.type()) {
        return false;
    }
    std::vector<std::size_t> identity(h.num_vertices());
    std::iota(identity.begin(), identity.end(), 0);
    const auto target = edge_tuples(h, identity);
    std::vector<std::size_t> perm = identity;
    do {
        bool sources_ok = true;
        for (std::size_t i = 0; i < g.type(); ++i) {
            sources_ok = sources_ok && perm[g.sources()[i]] == h.sources()[i];
        }
        if (sources_ok && edge_tuples(g, perm) == target) {
            return true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

bool IsoClasses::contains(const CGraph& g) const
{
    return std::any_of(reps_.begin(), reps_.end(), [&](const CGraph& r) { return same_up_to_permutation(r, g); });
}

bool IsoClasses::insert(const CGraph& g)
{
    if (contains(g)) {
        return false;
    }
    reps_.push_back(g);
    return true;
}

bool same_classes(const std::vector<CGraph>& a, const std::vector<CGraph>& b)
{
    IsoClasses ca;
    IsoClasses cb;
    for (const auto& g : a) {
        ca.insert(g);
    }
    for (const auto& g : b) {
        cb.insert(g);
    }
    if (ca.size() != cb.size()) {
        return false;
    }
    return std::all_of(ca.graphs().begin(), ca.graphs().end(), [&](const CGraph& g) { return cb.contains(g); });
}

std::size_t treewidth_all_orders(const CGraph& g)
{
    const std::size_t n = g.num_vertices();
    if (n == 0) {
        return 0;
    }
    std::vector<std::set<std::size_t>> adj(n);
    for (const auto& e : g.edges()) {
        for (std::size_t u : e.attach) {
            for (std::size_t v : e.attach) {
                if (u != v) {
                    adj[u].insert(v);
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::size_t best = n - 1;
    do {
        auto a = adj;
        std::vector<bool> gone(n, false);
        std::size_t width = 0;
        for (std::size_t v : order) {
            std::vector<std::size_t> nb;
            for (std::size_t w : a[v]) {
                if (!gone[w]) {
                    nb.push_back(w);
                }
            }
            width = std::max(width, nb.size());
            for (std::size_t x : nb) {
                for (std::size_t y : nb) {
                    if (x != y) {
                        a[x].insert(y);
                    }
                }
            }
            gone[v] = true;
        }
        best = std::min(best, width);
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

std::vector<std::vector<std::size_t>> set_partitions(std::size_t n)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> rgs(n, 0);
    std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t used) {
        if (i == n) {
            out.push_back(rgs);
            return;
        }
        for (std::size_t c = 0; c <= used && c < n; ++c) {
            rgs[i] = c;
            go(i + 1, std::max(used, c + 1));
        }
    };
    go(0, 0);
    return out;
}

std::optional<CGraph> quotient_by(const CGraph& g, const std::vector<std::size_t>& block)
{
    std::set<Tuple> seen;
    for (const auto& e : g.edges()) {
        std::vector<std::size_t> a;
        for (std::size_t v : e.attach) {
            a.push_back(block[v]);
        }
        if (e.label.name == slrkit::kDisequalityName && a.size() == 2 && a[0] == a[1]) {
            return std::nullopt;
        }
        if (!seen.emplace(e.label.name, a).second) {
            return std::nullopt;
        }
    }
    const std::size_t k = block.empty() ? 0 : *std::max_element(block.begin(), block.end()) + 1;
    CGraph q;
    for (std::size_t c = 0; c < k; ++c) {
        q.add_vertex("q" + std::to_string(c));
    }
    for (const auto& e : g.edges()) {
        std::vector<std::size_t> a;
        for (std::size_t v : e.attach) {
            a.push_back(block[v]);
        }
        q.add_edge(e.id, e.label, a);
    }
    std::vector<std::size_t> sources;
    for (std::size_t s : g.sources()) {
        sources.push_back(block[s]);
    }
    std::set<std::size_t> distinct(sources.begin(), sources.end());
    if (distinct.size() != sources.size()) {
        return std::nullopt;
    }
    q.set_sources(sources);
    return q;
}

std::vector<CGraph> fusions(const CGraph& g, std::optional<std::size_t> max_vertices)
{
    IsoClasses out;
    for (const auto& p : set_partitions(g.num_vertices())) {
        auto q = quotient_by(g, p);
        if (q && (!max_vertices || q->num_vertices() <= *max_vertices)) {
            out.insert(*q);
        }
    }
    return out.graphs();
}

std::vector<CGraph> fissions(const CGraph& g)
{
    IsoClasses out;
    const std::size_t n = g.num_vertices();
    for (std::size_t u = 0; u < n; ++u) {
        std::vector<std::pair<std::size_t, std::size_t>> occ;
        for (std::size_t e = 0; e < g.num_edges(); ++e) {
            for (std::size_t p = 0; p < g.edge(e).attach.size(); ++p) {
                if (g.edge(e).attach[p] == u) {
                    occ.emplace_back(e, p);
                }
            }
        }
        for (std::size_t mask = 0; mask < (std::size_t{1} << occ.size()); ++mask) {
            CGraph h;
            for (std::size_t v = 0; v <= n; ++v) {
                h.add_vertex("h" + std::to_string(v));
            }
            for (std::size_t e = 0; e < g.num_edges(); ++e) {
                auto a = g.edge(e).attach;
                for (std::size_t i = 0; i < occ.size(); ++i) {
                    if (occ[i].first == e && ((mask >> i) & 1U)) {
                        a[occ[i].second] = n;
                    }
                }
                h.add_edge(g.edge(e).id, g.edge(e).label, a);
            }
            h.set_sources(g.sources());
            std::vector<std::size_t> block(n + 1);
            std::iota(block.begin(), block.end(), 0);
            block[n] = u;
            auto back = quotient_by(h, block);
            if (back && same_up_to_permutation(*back, g)) {
                out.insert(h);
            }
        }
    }
    return out.graphs();
}

bool has_hamiltonian_cycle(const CGraph& g)
{
    const std::size_t n = g.num_vertices();
    if (n < 3) {
        return false;
    }
    std::set<std::pair<std::size_t, std::size_t>> adj;
    for (const auto& e : g.edges()) {
        if (e.attach.size() == 2) {
            adj.emplace(e.attach[0], e.attach[1]);
            adj.emplace(e.attach[1], e.attach[0]);
        }
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            ok = adj.count({perm[i], perm[(i + 1) % n]}) != 0;
        }
        if (ok) {
            return true;
        }
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
    return false;
}

bool is_bipartite(const CGraph& g)
{
    const std::size_t n = g.num_vertices();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        bool ok = true;
        for (const auto& e : g.edges()) {
            if (e.attach.size() == 2 && ((mask >> e.attach[0]) & 1U) == ((mask >> e.attach[1]) & 1U)) {
                ok = false;
            }
        }
        if (ok) {
            return true;
        }
    }
    return false;
}

std::set<slrkit::Vec> derivable_vectors(const slrkit::Cfg& cfg, long cap)
{
    const std::size_t m = cfg.terminals.size();
    std::vector<std::set<slrkit::Vec>> reach(cfg.nonterminals.size());
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& p : cfg.productions) {
            std::set<slrkit::Vec> acc{slrkit::Vec(m, 0)};
            for (const auto& s : p.rhs) {
                std::set<slrkit::Vec> next;
                for (const auto& v : acc) {
                    if (s.terminal) {
                        auto w = v;
                        ++w[s.index];
                        next.insert(w);
                        continue;
                    }
                    for (const auto& u : reach[s.index]) {
                        auto w = v;
                        for (std::size_t i = 0; i < m; ++i) {
                            w[i] += u[i];
                        }
                        next.insert(w);
                    }
                }
                acc.clear();
                for (const auto& v : next) {
                    if (std::accumulate(v.begin(), v.end(), 0L) <= cap) {
                        acc.insert(v);
                    }
                }
            }
            for (const auto& v : acc) {
                changed = reach[p.lhs].insert(v).second || changed;
            }
        }
    }
    return reach[cfg.start];
}

bool pumping_by_counting(const slrkit::Sid& sid, const std::string& pred, const std::set<std::string>& rules,
                         std::size_t max_edges, std::size_t threshold)
{
    for (const auto& t : slrkit::enumerate_parse_trees(sid, pred, max_edges)) {
        const auto counts = slrkit::rule_counts(t);
        const bool all = std::all_of(rules.begin(), rules.end(), [&](const std::string& r) {
            auto it = counts.find(r);
            return it != counts.end() && it->second > threshold;
        });
        if (all) {
            return true;
        }
    }
    return false;
}

CGraph random_simple_graph(std::mt19937& rng, const slrkit::Alphabet& alphabet, std::size_t max_vertices,
                           std::size_t max_edges)
{
    std::uniform_int_distribution<std::size_t> nv(1, max_vertices);
    const std::size_t n = nv(rng);
    std::uniform_int_distribution<std::size_t> pick_v(0, n - 1);
    std::uniform_int_distribution<std::size_t> pick_l(0, alphabet.size() - 1);
    std::uniform_int_distribution<std::size_t> ne(1, max_edges);
    std::set<Tuple> edges;
    const std::size_t target = ne(rng);
    for (std::size_t attempt = 0; attempt < 4 * target && edges.size() < target; ++attempt) {
        const auto& l = alphabet[pick_l(rng)];
        std::vector<std::size_t> a;
        for (int i = 0; i < l.arity; ++i) {
            a.push_back(pick_v(rng));
        }
        edges.emplace(l.name, a);
    }
    CGraph g;
    std::vector<bool> used(n, false);
    for (const auto& [l, a] : edges) {
        for (std::size_t v : a) {
            used[v] = true;
        }
    }
    std::vector<std::size_t> index(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        if (used[v]) {
            index[v] = g.add_vertex("v" + std::to_string(v));
        }
    }
    for (const auto& [l, a] : edges) {
        std::vector<std::size_t> b;
        for (std::size_t v : a) {
            b.push_back(index[v]);
        }
        g.add_edge("e" + std::to_string(g.num_edges()), slrkit::Label{l, static_cast<int>(a.size())}, b);
    }
    return g;
}

std::vector<CGraph> all_simple_graphs(const slrkit::Alphabet& alphabet, std::size_t n, std::size_t max_edges)
{
    std::vector<Tuple> candidates;
    for (const auto& l : n == 0 ? slrkit::Alphabet{} : alphabet) {
        std::vector<std::size_t> a(static_cast<std::size_t>(l.arity), 0);
        while (true) {
            candidates.emplace_back(l.name, a);
            std::size_t i = 0;
            while (i < a.size() && ++a[i] == n) {
                a[i++] = 0;
            }
            if (i == a.size()) {
                break;
            }
        }
    }
    std::vector<CGraph> out;
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t)> go = [&](std::size_t from) {
        CGraph g;
        for (std::size_t v = 0; v < n; ++v) {
            g.add_vertex("v" + std::to_string(v));
        }
        for (std::size_t c : chosen) {
            g.add_edge("e" + std::to_string(g.num_edges()),
                       slrkit::Label{candidates[c].first, static_cast<int>(candidates[c].second.size())},
                       candidates[c].second);
        }
        out.push_back(std::move(g));
        if (chosen.size() == max_edges) {
            return;
        }
        for (std::size_t c = from; c < candidates.size(); ++c) {
            chosen.push_back(c);
            go(c + 1);
            chosen.pop_back();
        }
    };
    go(0);
    return out;
}

slrkit::Sid random_regular_sid(std::mt19937& rng)
{
    auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
    auto upto = [&](int hi) { return std::uniform_int_distribution<int>(0, hi)(rng); };
    while (true) {
        // A is productive and nullary; P is productive unary; U, when present, is unproductive unary.
        const bool with_union = coin(0.5);
        std::string text = "alphabet b/2, c/2 ;\n";
        const std::vector<std::string> callees = with_union ? std::vector<std::string>{"P", "U"}
                                                            : std::vector<std::string>{"P"};
        auto productive_rule = [&](const std::string& head, bool nullary) {
            const int extra = 1 + upto(1);
            std::string params = nullary ? "" : "x1";
            std::string body = "exists";
            std::vector<std::string> vars;
            if (!nullary) {
                vars.push_back("x1");
            }
            for (int i = 1; i <= extra; ++i) {
                body += " y" + std::to_string(i);
                vars.push_back("y" + std::to_string(i));
            }
            body += " . ";
            std::vector<std::string> parts;
            for (std::size_t i = 1; i < vars.size(); ++i) {
                const std::string l = coin(0.5) ? "b" : "c";
                parts.push_back(coin(0.5) ? l + "(" + vars[i - 1] + "," + vars[i] + ")"
                                          : l + "(" + vars[i] + "," + vars[i - 1] + ")");
            }
            if (vars.size() == 1) {
                parts.push_back("b(" + vars[0] + "," + vars[0] + ")");
            }
            const int calls = upto(2);
            for (int c = 0; c < calls; ++c) {
                const auto& callee = callees[static_cast<std::size_t>(upto(static_cast<int>(callees.size()) - 1))];
                parts.push_back(callee + "(y" + std::to_string(1 + upto(extra - 1)) + ")");
            }
            std::string joined;
            for (const auto& p : parts) {
                joined += (joined.empty() ? "" : " * ") + p;
            }
            return head + "(" + params + ") <= " + body + joined + " ;\n";
        };
        text += productive_rule("A", true);
        if (coin(0.5)) {
            text += productive_rule("A", true);
        }
        text += productive_rule("P", false);
        if (coin(0.7)) {
            text += coin(0.5) ? "P(x1) <= b(x1,x1) ;\n" : "P(x1) <= c(x1,x1) ;\n";
        }
        if (coin(0.3)) {
            text += productive_rule("P", false);
        }
        if (with_union) {
            text += coin(0.5) ? "U(x1) <= U(x1) * P(x1) ;\n" : "U(x1) <= P(x1) * U(x1) ;\n";
            switch (upto(2)) {
            case 0:
                text += "U(x1) <= P(x1) ;\n";
                break;
            case 1:
                text += "U(x1) <= P(x1) * P(x1) ;\n";
                break;
            default:
                text += "U(x1) <= emp ;\n";
                break;
            }
        }
        slrkit::Sid sid = slrkit::parse_sid(text);
        if (slrkit::check_regular(sid).regular) {
            return sid;
        }
    }
}

} // namespace oracle
