#include "slrkit/fusion.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "slrkit/error.hpp"

namespace slrkit {

VertexEquivalence VertexEquivalence::identity(std::size_t num_vertices)
{
    std::vector<std::size_t> c(num_vertices);
    std::iota(c.begin(), c.end(), 0);
    return from_classes(std::move(c));
}

VertexEquivalence VertexEquivalence::from_pairs(
    std::size_t num_vertices, const std::vector<std::pair<std::size_t, std::size_t>>& pairs)
{
    std::vector<std::size_t> parent(num_vertices);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (auto [u, v] : pairs) {
        if (u >= num_vertices || v >= num_vertices) {
            throw Error(ErrorKind::InvalidGraph, "equivalence pair outside the vertex set");
        }
        parent[find(u)] = find(v);
    }
    std::vector<std::size_t> c(num_vertices);
    for (std::size_t v = 0; v < num_vertices; ++v) {
        c[v] = find(v);
    }
    return from_classes(std::move(c));
}

VertexEquivalence VertexEquivalence::from_classes(std::vector<std::size_t> class_of)
{
    std::map<std::size_t, std::size_t> renumber;
    for (auto& c : class_of) {
        auto it = renumber.find(c);
        if (it == renumber.end()) {
            it = renumber.emplace(c, renumber.size()).first;
        }
        c = it->second;
    }
    VertexEquivalence eq;
    eq.num_classes_ = renumber.size();
    eq.class_of_ = std::move(class_of);
    return eq;
}

std::vector<std::pair<std::size_t, std::size_t>> VertexEquivalence::generators() const
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::vector<std::optional<std::size_t>> first(num_classes_);
    for (std::size_t v = 0; v < class_of_.size(); ++v) {
        auto& f = first[class_of_[v]];
        if (f) {
            out.emplace_back(*f, v);
        } else {
            f = v;
        }
    }
    return out;
}

bool compatible(const CGraph& g, const VertexEquivalence& eq)
{
    if (eq.size() != g.num_vertices()) {
        return false;
    }
    std::set<std::pair<std::string, std::vector<std::size_t>>> seen;
    for (const auto& e : g.edges()) {
        std::vector<std::size_t> tuple;
        for (std::size_t v : e.attach) {
            tuple.push_back(eq.class_of(v));
        }
        if (e.label.name == kDisequalityName && tuple.size() == 2 && tuple[0] == tuple[1]) {
            return false;
        }
        if (!seen.emplace(e.label.name, std::move(tuple)).second) {
            return false;
        }
    }
    return true;
}

CGraph quotient(const CGraph& g, const VertexEquivalence& eq)
{
    if (!compatible(g, eq)) {
        throw Error(ErrorKind::Incompatible, "equivalence is not compatible with the graph");
    }
    CGraph out;
    std::vector<std::size_t> vertex_of_class(eq.num_classes(), 0);
    std::vector<bool> made(eq.num_classes(), false);
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        const std::size_t c = eq.class_of(v);
        if (!made[c]) {
            made[c] = true;
            vertex_of_class[c] = out.add_vertex(g.vertex_id(v));
        }
    }
    for (const auto& e : g.edges()) {
        std::vector<std::size_t> attach;
        for (std::size_t v : e.attach) {
            attach.push_back(vertex_of_class[eq.class_of(v)]);
        }
        out.add_edge(e.id, e.label, std::move(attach));
    }
    std::vector<std::size_t> sources;
    for (std::size_t s : g.sources()) {
        sources.push_back(vertex_of_class[eq.class_of(s)]);
    }
    std::vector<std::size_t> dedup = sources;
    std::sort(dedup.begin(), dedup.end());
    if (std::unique(dedup.begin(), dedup.end()) != dedup.end()) {
        throw Error(ErrorKind::Incompatible, "equivalence joins two sources");
    }
    out.set_sources(std::move(sources));
    return out;
}

namespace {

class CompatibleSearch {
public:
    CompatibleSearch(const CGraph& g, const EquivalenceFilter& filter,
                     const std::function<bool(const VertexEquivalence&)>& visit)
        : g_(g), filter_(filter), visit_(visit), n_(g.num_vertices())
    {
        auto deg = g.degrees();
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return deg[a] > deg[b]; });
        std::vector<std::size_t> position(n_, 0);
        for (std::size_t t = 0; t < n_; ++t) {
            position[order_[t]] = t;
        }
        auto labels = g.labels();
        completed_at_.assign(n_, {});
        for (std::size_t e = 0; e < g.num_edges(); ++e) {
            std::size_t last = 0;
            for (std::size_t v : g.edge(e).attach) {
                last = std::max(last, position[v]);
            }
            completed_at_[last].push_back(e);
        }
        label_index_.reserve(g.num_edges());
        for (const auto& e : g.edges()) {
            label_index_.push_back(static_cast<std::size_t>(
                std::lower_bound(labels.begin(), labels.end(), e.label) - labels.begin()));
        }
        assigned_.assign(n_, 0);
        if (filter_.exact_generators) {
            if (*filter_.exact_generators > n_ && n_ > 0) {
                target_ = std::nullopt;
                impossible_ = true;
            } else {
                target_ = n_ - std::min(n_, *filter_.exact_generators);
            }
        }
    }

    void run()
    {
        if (impossible_) {
            return;
        }
        if (n_ == 0) {
            if (!target_ || *target_ == 0) {
                visit_(VertexEquivalence::identity(0));
            }
            return;
        }
        step(0, 0);
    }

private:
    bool step(std::size_t t, std::size_t used)
    {
        if (t == n_) {
            if (target_ && used != *target_) {
                return true;
            }
            return visit_(VertexEquivalence::from_classes(assigned_));
        }
        const std::size_t v = order_[t];
        std::size_t limit = used + 1;
        if (filter_.max_classes) {
            limit = std::min(limit, *filter_.max_classes);
        }
        if (target_) {
            limit = std::min(limit, *target_);
        }
        for (std::size_t c = 0; c < limit; ++c) {
            const std::size_t now_used = std::max(used, c + 1);
            if (target_ && now_used + (n_ - t - 1) < *target_) {
                continue;
            }
            assigned_[v] = c;
            std::vector<std::vector<std::size_t>> inserted;
            bool ok = true;
            for (std::size_t e : completed_at_[t]) {
                const Edge& edge = g_.edge(e);
                std::vector<std::size_t> key{label_index_[e]};
                for (std::size_t w : edge.attach) {
                    key.push_back(assigned_[w]);
                }
                if (edge.label.name == kDisequalityName && key.size() == 3 && key[1] == key[2]) {
                    ok = false;
                    break;
                }
                if (!keys_.insert(key).second) {
                    ok = false;
                    break;
                }
                inserted.push_back(std::move(key));
            }
            bool keep_going = true;
            if (ok) {
                keep_going = step(t + 1, now_used);
            }
            for (const auto& key : inserted) {
                keys_.erase(key);
            }
            if (!keep_going) {
                return false;
            }
        }
        return true;
    }

    const CGraph& g_;
    const EquivalenceFilter& filter_;
    const std::function<bool(const VertexEquivalence&)>& visit_;
    std::size_t n_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<std::size_t>> completed_at_;
    std::vector<std::size_t> label_index_;
    std::vector<std::size_t> assigned_;
    std::set<std::vector<std::size_t>> keys_;
    std::optional<std::size_t> target_;
    bool impossible_ = false;
};

} // namespace

void for_each_compatible(const CGraph& g, const EquivalenceFilter& filter,
                         const std::function<bool(const VertexEquivalence&)>& visit)
{
    CompatibleSearch(g, filter, visit).run();
}

namespace {

GraphSet collect(const CGraph& g, const EquivalenceFilter& filter)
{
    GraphSet out;
    for_each_compatible(g, filter, [&](const VertexEquivalence& eq) {
        out.insert(quotient(g, eq));
        return true;
    });
    return out;
}

} // namespace

GraphSet fusion_all(const CGraph& g)
{
    return collect(g, {});
}

GraphSet fusion_k(const CGraph& g, std::size_t k)
{
    EquivalenceFilter f;
    f.exact_generators = k;
    return collect(g, f);
}

GraphSet fusion_up_to(const CGraph& g, std::size_t max_vertices)
{
    EquivalenceFilter f;
    f.max_classes = max_vertices;
    return collect(g, f);
}

GraphSet fission_1(const CGraph& g)
{
    GraphSet out;
    for (std::size_t u = 0; u < g.num_vertices(); ++u) {
        std::vector<std::pair<std::size_t, std::size_t>> occurrences;
        for (std::size_t e = 0; e < g.num_edges(); ++e) {
            const auto& att = g.edge(e).attach;
            for (std::size_t p = 0; p < att.size(); ++p) {
                if (att[p] == u) {
                    occurrences.emplace_back(e, p);
                }
            }
        }
        if (occurrences.size() >= 24) {
            throw Error(ErrorKind::TooLarge, "vertex degree too large for fission");
        }
        const std::string copy_id = g.fresh_id(g.vertex_id(u) + "'");
        for (std::size_t mask = 0; mask < (std::size_t{1} << occurrences.size()); ++mask) {
            CGraph h;
            for (const auto& v : g.vertices()) {
                h.add_vertex(v);
            }
            const std::size_t copy = h.add_vertex(copy_id);
            std::vector<std::vector<std::size_t>> attach;
            for (const auto& e : g.edges()) {
                attach.push_back(e.attach);
            }
            for (std::size_t i = 0; i < occurrences.size(); ++i) {
                if ((mask >> i) & 1U) {
                    attach[occurrences[i].first][occurrences[i].second] = copy;
                }
            }
            for (std::size_t e = 0; e < g.num_edges(); ++e) {
                h.add_edge(g.edge(e).id, g.edge(e).label, attach[e]);
            }
            h.set_sources(g.sources());
            auto back = VertexEquivalence::from_pairs(h.num_vertices(), {{u, copy}});
            if (compatible(h, back)) {
                out.insert(h);
            }
        }
    }
    return out;
}

GraphSet fission_k(const CGraph& g, std::size_t k)
{
    GraphSet current;
    current.insert(g);
    for (std::size_t i = 0; i < k; ++i) {
        GraphSet next;
        for (const auto& h : current.graphs()) {
            for (const auto& f : fission_1(h).graphs()) {
                next.insert(f);
            }
        }
        current = std::move(next);
    }
    return current;
}

std::size_t fb_of_graph(const CGraph& g)
{
    std::size_t best = 0;
    for_each_compatible(g, {}, [&](const VertexEquivalence& eq) {
        best = std::max(best, eq.min_generators());
        return best + 1 < g.num_vertices();
    });
    return best;
}

} // namespace slrkit
