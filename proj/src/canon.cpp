#include "slrkit/canon.hpp"

#include <algorithm>
#include <numeric>

#include "slrkit/error.hpp"

namespace slrkit {

namespace {

using Code = std::vector<long>;

class Canonizer {
public:
    explicit Canonizer(const CGraph& g) : g_(g), n_(g.num_vertices())
    {
        labels_ = g.labels();
        edge_label_.reserve(g.num_edges());
        for (const auto& e : g.edges()) {
            auto it = std::lower_bound(labels_.begin(), labels_.end(), e.label);
            edge_label_.push_back(static_cast<long>(it - labels_.begin()));
        }
        incidences_.assign(n_, {});
        for (std::size_t e = 0; e < g.num_edges(); ++e) {
            const auto& att = g.edge(e).attach;
            for (std::size_t p = 0; p < att.size(); ++p) {
                incidences_[att[p]].emplace_back(e, p);
            }
        }
        source_pos_.assign(n_, 0);
        for (std::size_t i = 0; i < g.type(); ++i) {
            source_pos_[g.sources()[i]] = static_cast<long>(i + 1);
        }
    }

    CanonicalForm run()
    {
        std::vector<long> colors(n_, 0);
        for (std::size_t v = 0; v < n_; ++v) {
            colors[v] = source_pos_[v];
        }
        search(colors, {});

        CanonicalForm out;
        out.order = best_order_;
        std::string key;
        for (const auto& l : labels_) {
            key += l.name + "/" + std::to_string(l.arity) + ",";
        }
        key += "|";
        for (long x : best_) {
            key += std::to_string(x) + ".";
        }
        out.key = std::move(key);
        return out;
    }

private:
    static constexpr std::size_t kNoJump = static_cast<std::size_t>(-1);

    // Ranks signatures; the old color leads each signature so the partition only refines.
    void refine(std::vector<long>& colors) const
    {
        std::size_t classes = count_classes(colors);
        while (true) {
            std::vector<Code> sigs(n_);
            for (std::size_t v = 0; v < n_; ++v) {
                std::vector<Code> inc;
                inc.reserve(incidences_[v].size());
                for (auto [e, p] : incidences_[v]) {
                    Code c{edge_label_[e], static_cast<long>(p)};
                    for (std::size_t w : g_.edge(e).attach) {
                        c.push_back(colors[w]);
                    }
                    inc.push_back(std::move(c));
                }
                std::sort(inc.begin(), inc.end());
                Code sig{colors[v]};
                for (const auto& c : inc) {
                    sig.push_back(-1);
                    sig.insert(sig.end(), c.begin(), c.end());
                }
                sigs[v] = std::move(sig);
            }
            std::vector<Code> sorted = sigs;
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            for (std::size_t v = 0; v < n_; ++v) {
                colors[v] = static_cast<long>(
                    std::lower_bound(sorted.begin(), sorted.end(), sigs[v]) - sorted.begin());
            }
            if (sorted.size() == classes) {
                return;
            }
            classes = sorted.size();
        }
    }

    static std::size_t count_classes(const std::vector<long>& colors)
    {
        std::vector<long> c = colors;
        std::sort(c.begin(), c.end());
        return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
    }

    Code encode(const std::vector<long>& pos) const
    {
        Code code{static_cast<long>(n_), static_cast<long>(g_.type())};
        for (std::size_t s : g_.sources()) {
            code.push_back(pos[s]);
        }
        std::vector<Code> edges;
        edges.reserve(g_.num_edges());
        for (std::size_t e = 0; e < g_.num_edges(); ++e) {
            Code c{edge_label_[e]};
            for (std::size_t w : g_.edge(e).attach) {
                c.push_back(pos[w]);
            }
            edges.push_back(std::move(c));
        }
        std::sort(edges.begin(), edges.end());
        code.push_back(static_cast<long>(edges.size()));
        for (const auto& c : edges) {
            code.insert(code.end(), c.begin(), c.end());
        }
        return code;
    }

    std::vector<std::size_t> order_of(const std::vector<long>& pos) const
    {
        std::vector<std::size_t> order(n_, 0);
        for (std::size_t v = 0; v < n_; ++v) {
            order[static_cast<std::size_t>(pos[v])] = v;
        }
        return order;
    }

    // Returns the depth to back-jump to, or kNoJump.
    std::size_t search(std::vector<long> colors, std::vector<std::size_t> path)
    {
        refine(colors);
        const std::size_t level = path.size();
        if (count_classes(colors) == n_) {
            Code code = encode(colors);
            auto order = order_of(colors);
            if (!have_first_) {
                have_first_ = true;
                first_ = code;
                first_order_ = order;
                first_path_ = path;
                best_ = code;
                best_order_ = order;
                return kNoJump;
            }
            if (code == first_) {
                std::vector<std::size_t> gamma(n_, 0);
                for (std::size_t p = 0; p < n_; ++p) {
                    gamma[first_order_[p]] = order[p];
                }
                std::size_t common = 0;
                while (common < path.size() && common < first_path_.size() &&
                       path[common] == first_path_[common]) {
                    ++common;
                }
                automorphisms_.emplace_back(common, std::move(gamma));
                return common;
            }
            if (code < best_) {
                best_ = std::move(code);
                best_order_ = std::move(order);
            }
            return kNoJump;
        }

        long target = -1;
        {
            std::vector<std::size_t> size(n_, 0);
            for (long c : colors) {
                ++size[static_cast<std::size_t>(c)];
            }
            for (std::size_t c = 0; c < n_; ++c) {
                if (size[c] > 1) {
                    target = static_cast<long>(c);
                    break;
                }
            }
        }
        std::vector<std::size_t> cell;
        for (std::size_t v = 0; v < n_; ++v) {
            if (colors[v] == target) {
                cell.push_back(v);
            }
        }

        const bool on_first_path =
            have_first_ && first_path_.size() >= level &&
            std::equal(path.begin(), path.end(), first_path_.begin());
        std::vector<std::size_t> tried;
        for (std::size_t v : cell) {
            if (on_first_path && !tried.empty() && in_orbit_of(v, tried, level)) {
                continue;
            }
            tried.push_back(v);
            std::vector<long> next(n_);
            for (std::size_t w = 0; w < n_; ++w) {
                next[w] = 2 * colors[w] + (w == v ? 0 : 1);
            }
            auto child_path = path;
            child_path.push_back(v);
            std::size_t jump = search(std::move(next), std::move(child_path));
            if (jump != kNoJump && jump < level) {
                return jump;
            }
        }
        return kNoJump;
    }

    bool in_orbit_of(std::size_t v, const std::vector<std::size_t>& tried, std::size_t level) const
    {
        std::vector<std::size_t> parent(n_);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            return x;
        };
        for (const auto& [depth, gamma] : automorphisms_) {
            if (depth < level) {
                continue;
            }
            for (std::size_t x = 0; x < n_; ++x) {
                parent[find(x)] = find(gamma[x]);
            }
        }
        for (std::size_t t : tried) {
            if (find(t) == find(v)) {
                return true;
            }
        }
        return false;
    }

    const CGraph& g_;
    std::size_t n_;
    Alphabet labels_;
    std::vector<long> edge_label_;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> incidences_;
    std::vector<long> source_pos_;

    bool have_first_ = false;
    Code first_;
    std::vector<std::size_t> first_order_;
    std::vector<std::size_t> first_path_;
    Code best_;
    std::vector<std::size_t> best_order_;
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> automorphisms_;
};

} // namespace

CanonicalForm canonical_form(const CGraph& g)
{
    return Canonizer(g).run();
}

std::string canonical_key(const CGraph& g)
{
    return canonical_form(g).key;
}

std::optional<Isomorphism> isomorphic(const CGraph& g, const CGraph& h)
{
    if (g.num_vertices() != h.num_vertices() || g.num_edges() != h.num_edges() ||
        g.type() != h.type()) {
        return std::nullopt;
    }
    auto cg = canonical_form(g);
    auto ch = canonical_form(h);
    if (cg.key != ch.key) {
        return std::nullopt;
    }
    Isomorphism iso;
    iso.vertex_map.assign(g.num_vertices(), 0);
    for (std::size_t p = 0; p < cg.order.size(); ++p) {
        iso.vertex_map[cg.order[p]] = ch.order[p];
    }
    std::map<std::pair<std::string, std::vector<std::size_t>>, std::vector<std::size_t>> pool;
    for (std::size_t e = h.num_edges(); e-- > 0;) {
        pool[{h.edge(e).label.name, h.edge(e).attach}].push_back(e);
    }
    iso.edge_map.assign(g.num_edges(), 0);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        std::vector<std::size_t> image;
        for (std::size_t v : g.edge(e).attach) {
            image.push_back(iso.vertex_map[v]);
        }
        auto& bucket = pool[{g.edge(e).label.name, image}];
        if (bucket.empty()) {
            throw Error(ErrorKind::InvalidGraph, "canonical forms agree but edges do not match");
        }
        iso.edge_map[e] = bucket.back();
        bucket.pop_back();
    }
    return iso;
}

bool is_isomorphism(const CGraph& g, const CGraph& h, const Isomorphism& iso)
{
    if (g.num_vertices() != h.num_vertices() || g.num_edges() != h.num_edges() ||
        iso.vertex_map.size() != g.num_vertices() || iso.edge_map.size() != g.num_edges() ||
        g.type() != h.type()) {
        return false;
    }
    std::vector<bool> hit(h.num_vertices(), false);
    for (std::size_t w : iso.vertex_map) {
        if (w >= h.num_vertices() || hit[w]) {
            return false;
        }
        hit[w] = true;
    }
    std::vector<bool> ehit(h.num_edges(), false);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        std::size_t f = iso.edge_map[e];
        if (f >= h.num_edges() || ehit[f]) {
            return false;
        }
        ehit[f] = true;
        if (g.edge(e).label != h.edge(f).label) {
            return false;
        }
        for (std::size_t p = 0; p < g.edge(e).attach.size(); ++p) {
            if (iso.vertex_map[g.edge(e).attach[p]] != h.edge(f).attach[p]) {
                return false;
            }
        }
    }
    for (std::size_t i = 0; i < g.type(); ++i) {
        if (iso.vertex_map[g.sources()[i]] != h.sources()[i]) {
            return false;
        }
    }
    return true;
}

bool GraphSet::insert(const CGraph& g)
{
    Order key{g.num_vertices(), g.num_edges(), canonical_key(g)};
    return graphs_.emplace(std::move(key), g).second;
}

bool GraphSet::contains(const CGraph& g) const
{
    return graphs_.count(Order{g.num_vertices(), g.num_edges(), canonical_key(g)}) != 0;
}

std::vector<CGraph> GraphSet::graphs() const
{
    std::vector<CGraph> out;
    out.reserve(graphs_.size());
    for (const auto& [key, g] : graphs_) {
        out.push_back(g);
    }
    return out;
}

std::vector<std::string> GraphSet::keys() const
{
    std::vector<std::string> out;
    out.reserve(graphs_.size());
    for (const auto& [key, g] : graphs_) {
        out.push_back(std::get<2>(key));
    }
    return out;
}

} // namespace slrkit
