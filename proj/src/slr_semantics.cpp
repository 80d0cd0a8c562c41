#include "slrkit/slr_semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "slrkit/error.hpp"
#include "slrkit/fusion.hpp"

namespace slrkit {

namespace {

class UnionFind {
public:
    std::size_t add()
    {
        parent_.push_back(parent_.size());
        return parent_.size() - 1;
    }
    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void join(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

void qpf_atoms(const SlrFormula& f, std::vector<const SlrFormula*>& out)
{
    if (f.kind == SlrFormula::Kind::Sep) {
        for (const auto& c : f.children) {
            qpf_atoms(c, out);
        }
    } else {
        out.push_back(&f);
    }
}

} // namespace

std::optional<std::pair<CGraph, Store>> sat_qpf(const SlrFormula& phi)
{
    if (!is_qpf(phi)) {
        throw Error(ErrorKind::InvalidGraph, "sat_qpf expects a quantifier- and predicate-free formula");
    }
    std::vector<const SlrFormula*> atoms;
    qpf_atoms(phi, atoms);
    std::map<std::string, std::size_t> var_index;
    UnionFind uf;
    auto index = [&](const std::string& v) {
        auto it = var_index.find(v);
        if (it == var_index.end()) {
            it = var_index.emplace(v, uf.add()).first;
        }
        return it->second;
    };
    for (const auto* a : atoms) {
        for (const auto& x : a->args) {
            index(x);
        }
        if (a->kind == SlrFormula::Kind::Eq) {
            uf.join(index(a->args[0]), index(a->args[1]));
        }
    }
    CGraph g;
    std::map<std::size_t, std::size_t> vertex_of_class;
    std::set<std::pair<std::string, std::vector<std::size_t>>> seen;
    for (const auto* a : atoms) {
        if (a->kind == SlrFormula::Kind::Neq && uf.find(index(a->args[0])) == uf.find(index(a->args[1]))) {
            return std::nullopt;
        }
        if (a->kind != SlrFormula::Kind::Rel) {
            continue;
        }
        std::vector<std::size_t> attach;
        for (const auto& x : a->args) {
            const std::size_t c = uf.find(index(x));
            auto it = vertex_of_class.find(c);
            if (it == vertex_of_class.end()) {
                it = vertex_of_class.emplace(c, g.add_vertex("v" + std::to_string(vertex_of_class.size()))).first;
            }
            attach.push_back(it->second);
        }
        if (!seen.emplace(a->name, attach).second) {
            return std::nullopt;
        }
        const Label label{a->name, static_cast<int>(attach.size())};
        g.add_edge("e" + std::to_string(g.num_edges()), label, std::move(attach));
    }
    Store store;
    for (const auto& [v, i] : var_index) {
        if (auto it = vertex_of_class.find(uf.find(i)); it != vertex_of_class.end()) {
            store[v] = it->second;
        }
    }
    return std::make_pair(std::move(g), std::move(store));
}

std::size_t default_fuel(const CGraph& g, const Sid& sid)
{
    return 2 * (g.num_vertices() + g.num_edges()) + sid.rules.size();
}

namespace {

using Mask = std::uint64_t;
constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;

struct CRel {
    std::string label;
    std::vector<std::size_t> args;
};

struct CPred {
    std::size_t pred;
    std::vector<std::size_t> args;
};

// Slots bound in `exists` range over the vertices touched by the edges the block consumes.
struct CBlock {
    std::vector<std::size_t> exists;
    std::vector<CRel> rels;
    std::vector<std::pair<std::size_t, std::size_t>> eqs;
    std::vector<std::pair<std::size_t, std::size_t>> neqs;
    std::vector<CPred> preds;
    std::vector<CBlock> subs;
};

struct CRule {
    std::size_t num_slots;
    CBlock body;
};

class Compiler {
public:
    explicit Compiler(const std::map<std::string, std::size_t>& pred_index) : pred_index_(pred_index) {}

    CBlock compile(const SlrFormula& f, std::map<std::string, std::size_t> scope, std::size_t& slots)
    {
        slots_ = &slots;
        CBlock block;
        add(block, f, scope);
        return block;
    }

private:
    static bool in_top_relation(const SlrFormula& body, const std::string& v)
    {
        for (const auto& op : sep_operands(body)) {
            if (op.kind == SlrFormula::Kind::Rel &&
                std::find(op.args.begin(), op.args.end(), v) != op.args.end()) {
                return true;
            }
        }
        return false;
    }

    void add(CBlock& block, const SlrFormula& f, const std::map<std::string, std::size_t>& scope)
    {
        using K = SlrFormula::Kind;
        auto slots_of = [&](const std::vector<std::string>& args) {
            std::vector<std::size_t> out;
            for (const auto& a : args) {
                auto it = scope.find(a);
                if (it == scope.end()) {
                    throw Error(ErrorKind::UndeclaredSymbol, "unbound variable " + a);
                }
                out.push_back(it->second);
            }
            return out;
        };
        switch (f.kind) {
        case K::Emp:
            return;
        case K::Eq:
        case K::Neq: {
            auto s = slots_of(f.args);
            (f.kind == K::Eq ? block.eqs : block.neqs).emplace_back(s[0], s[1]);
            return;
        }
        case K::Rel:
            block.rels.push_back({f.name, slots_of(f.args)});
            return;
        case K::Pred: {
            auto it = pred_index_.find(f.name);
            if (it == pred_index_.end()) {
                throw Error(ErrorKind::UndeclaredSymbol, "unknown predicate " + f.name);
            }
            block.preds.push_back({it->second, slots_of(f.args)});
            return;
        }
        case K::Sep:
            for (const auto& c : f.children) {
                add(block, c, scope);
            }
            return;
        case K::Exists: {
            std::vector<std::string> vars;
            const SlrFormula* body = &f;
            while (body->kind == K::Exists) {
                vars.push_back(body->name);
                body = &body->children.front();
            }
            auto inner = scope;
            std::vector<std::size_t> fresh;
            for (const auto& v : vars) {
                fresh.push_back((*slots_)++);
                inner[v] = fresh.back();
            }
            const bool hoist = std::all_of(vars.begin(), vars.end(),
                                           [&](const std::string& v) { return in_top_relation(*body, v); });
            if (hoist) {
                block.exists.insert(block.exists.end(), fresh.begin(), fresh.end());
                add(block, *body, inner);
            } else {
                CBlock sub;
                sub.exists = fresh;
                add(sub, *body, inner);
                block.subs.push_back(std::move(sub));
            }
            return;
        }
        }
    }

    const std::map<std::string, std::size_t>& pred_index_;
    std::size_t* slots_ = nullptr;
};

struct CompiledSid {
    std::map<std::string, std::size_t> pred_index;
    std::vector<std::string> pred_names;
    std::vector<std::vector<CRule>> rules;
};

CompiledSid compile_sid(const Sid& sid)
{
    CompiledSid out;
    for (const auto& [name, ar] : sid.predicates) {
        out.pred_index.emplace(name, out.pred_names.size());
        out.pred_names.push_back(name);
    }
    out.rules.resize(out.pred_names.size());
    Compiler compiler(out.pred_index);
    for (const auto& r : sid.rules) {
        std::map<std::string, std::size_t> scope;
        std::size_t slots = 0;
        for (const auto& p : r.params) {
            scope[p] = slots++;
        }
        CRule cr;
        cr.body = compiler.compile(r.body, scope, slots);
        cr.num_slots = slots;
        out.rules[out.pred_index.at(r.head)].push_back(std::move(cr));
    }
    return out;
}

constexpr long kUnbound = -1;

class ModelChecker {
public:
    ModelChecker(const CGraph& g, const CompiledSid& sid) : g_(g), sid_(sid)
    {
        touch_.assign(g.num_edges(), 0);
        for (std::size_t e = 0; e < g.num_edges(); ++e) {
            for (std::size_t v : g.edge(e).attach) {
                touch_[e] |= Mask{1} << v;
            }
        }
    }

    std::size_t top(const CBlock& block, std::vector<long>& frame, Mask m) { return eval_block(block, frame, m); }

private:
    Mask touched(Mask m) const
    {
        Mask out = 0;
        for (std::size_t e = 0; e < touch_.size(); ++e) {
            if ((m >> e) & 1U) {
                out |= touch_[e];
            }
        }
        return out;
    }

    std::size_t eval_block(const CBlock& block, std::vector<long>& frame, Mask m)
    {
        std::size_t best = kInf;
        unify(block, 0, frame, m, m, best);
        return best;
    }

    void unify(const CBlock& block, std::size_t i, std::vector<long>& frame, Mask rest, Mask whole,
               std::size_t& best)
    {
        if (i == block.rels.size()) {
            std::vector<std::size_t> open;
            for (std::size_t s : block.exists) {
                if (frame[s] == kUnbound) {
                    open.push_back(s);
                }
            }
            bind_open(block, open, 0, frame, rest, whole, best);
            return;
        }
        const CRel& rel = block.rels[i];
        for (std::size_t e = 0; e < g_.num_edges(); ++e) {
            if (!((rest >> e) & 1U) || g_.edge(e).label.name != rel.label ||
                g_.edge(e).attach.size() != rel.args.size()) {
                continue;
            }
            std::vector<std::size_t> assigned;
            bool ok = true;
            for (std::size_t p = 0; p < rel.args.size(); ++p) {
                const long want = static_cast<long>(g_.edge(e).attach[p]);
                long& slot = frame[rel.args[p]];
                if (slot == kUnbound) {
                    slot = want;
                    assigned.push_back(rel.args[p]);
                } else if (slot != want) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                unify(block, i + 1, frame, rest & ~(Mask{1} << e), whole, best);
            }
            for (std::size_t s : assigned) {
                frame[s] = kUnbound;
            }
        }
    }

    void bind_open(const CBlock& block, const std::vector<std::size_t>& open, std::size_t k,
                   std::vector<long>& frame, Mask rest, Mask whole, std::size_t& best)
    {
        if (k == open.size()) {
            for (auto [a, b] : block.eqs) {
                if (frame[a] != frame[b]) {
                    return;
                }
            }
            for (auto [a, b] : block.neqs) {
                if (frame[a] == frame[b]) {
                    return;
                }
            }
            const std::size_t items = block.preds.size() + block.subs.size();
            if (items == 0) {
                if (rest == 0) {
                    best = 0;
                }
                return;
            }
            best = std::min(best, distribute(block, 0, frame, rest));
            return;
        }
        const Mask verts = touched(whole);
        for (std::size_t v = 0; v < g_.num_vertices(); ++v) {
            if ((verts >> v) & 1U) {
                frame[open[k]] = static_cast<long>(v);
                bind_open(block, open, k + 1, frame, rest, whole, best);
            }
        }
        frame[open[k]] = kUnbound;
    }

    std::size_t item_cost(const CBlock& block, std::size_t idx, std::vector<long>& frame, Mask m)
    {
        if (idx < block.preds.size()) {
            const CPred& p = block.preds[idx];
            std::vector<std::size_t> args;
            for (std::size_t s : p.args) {
                args.push_back(static_cast<std::size_t>(frame[s]));
            }
            return pred_cost(p.pred, args, m);
        }
        const CBlock& sub = block.subs[idx - block.preds.size()];
        const std::size_t c = eval_block(sub, frame, m);
        return c;
    }

    std::size_t distribute(const CBlock& block, std::size_t idx, std::vector<long>& frame, Mask rest)
    {
        const std::size_t items = block.preds.size() + block.subs.size();
        if (idx + 1 == items) {
            return item_cost(block, idx, frame, rest);
        }
        std::size_t best = kInf;
        // Enumerates every submask of rest, including rest itself and the empty mask.
        for (Mask part = rest;; part = (part - 1) & rest) {
            const std::size_t first = item_cost(block, idx, frame, part);
            if (first < best) {
                const std::size_t others = distribute(block, idx + 1, frame, rest & ~part);
                if (others < kInf) {
                    best = std::min(best, first + others);
                }
            }
            if (part == 0) {
                break;
            }
        }
        return best;
    }

    struct Key {
        std::size_t pred;
        std::vector<std::size_t> args;
        Mask mask;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept
        {
            std::size_t h = std::hash<std::size_t>{}(k.pred) ^ (std::hash<Mask>{}(k.mask) * 31U);
            for (std::size_t a : k.args) {
                h = h * 1000003U ^ a;
            }
            return h;
        }
    };

    std::size_t pred_cost(std::size_t pred, const std::vector<std::size_t>& args, Mask m)
    {
        Key key{pred, args, m};
        if (auto it = memo_.find(key); it != memo_.end()) {
            return it->second;
        }
        if (auto it = active_.find(key); it != active_.end()) {
            low_ = std::min(low_, it->second);
            return kInf;
        }
        const std::size_t depth = active_.size();
        active_.emplace(key, depth);
        const std::size_t saved_low = low_;
        low_ = kInf;
        std::size_t best = kInf;
        for (const auto& rule : sid_.rules[pred]) {
            std::vector<long> frame(rule.num_slots, kUnbound);
            for (std::size_t i = 0; i < args.size(); ++i) {
                frame[i] = static_cast<long>(args[i]);
            }
            const std::size_t c = eval_block(rule.body, frame, m);
            if (c < kInf) {
                best = std::min(best, c + 1);
            }
        }
        active_.erase(key);
        // Results that relied on a cut cycle through an enclosing call are not final.
        if (low_ >= depth) {
            memo_.emplace(std::move(key), best);
            low_ = saved_low;
        } else {
            low_ = std::min(saved_low, low_);
        }
        return best;
    }

    const CGraph& g_;
    const CompiledSid& sid_;
    std::vector<Mask> touch_;
    std::unordered_map<Key, std::size_t, KeyHash> memo_;
    std::unordered_map<Key, std::size_t, KeyHash> active_;
    std::size_t low_ = kInf;
};

} // namespace

std::optional<std::size_t> slr_unfoldings(const CGraph& g, const Store& s, const SlrFormula& phi, const Sid& sid)
{
    if (g.num_edges() > 64 || g.num_vertices() > 64) {
        throw Error(ErrorKind::TooLarge, "model checking limited to 64 edges and 64 vertices");
    }
    if (!is_simple(g)) {
        return std::nullopt;
    }
    const auto touched = g.touched();
    if (std::find(touched.begin(), touched.end(), false) != touched.end()) {
        return std::nullopt;
    }
    const CompiledSid compiled = compile_sid(sid);
    std::map<std::string, std::size_t> scope;
    std::size_t slots = 0;
    std::vector<long> frame;
    for (const auto& v : free_vars(phi)) {
        auto it = s.find(v);
        if (it == s.end()) {
            throw Error(ErrorKind::UndeclaredSymbol, "store does not define " + v);
        }
        if (it->second >= g.num_vertices()) {
            throw Error(ErrorKind::InvalidGraph, "store maps " + v + " outside the graph");
        }
        scope[v] = slots++;
        frame.push_back(static_cast<long>(it->second));
    }
    Compiler compiler(compiled.pred_index);
    CBlock block = compiler.compile(phi, scope, slots);
    frame.resize(slots, kUnbound);
    ModelChecker checker(g, compiled);
    const Mask all = g.num_edges() == 64 ? ~Mask{0} : (Mask{1} << g.num_edges()) - 1;
    const std::size_t cost = checker.top(block, frame, all);
    if (cost >= kInf) {
        return std::nullopt;
    }
    return cost;
}

Verdict slr_models(const CGraph& g, const Store& s, const SlrFormula& phi, const Sid& sid,
                   std::optional<std::size_t> fuel)
{
    const auto cost = slr_unfoldings(g, s, phi, sid);
    const std::size_t limit = fuel.value_or(default_fuel(g, sid));
    return cost && *cost <= limit ? Verdict::True : Verdict::FalseAtFuel;
}

namespace {

// Least fixed point of the rules over the vertex universe {0..n-1}; models are edge masks.
class FixpointEnumerator {
public:
    FixpointEnumerator(const Sid& sid, std::size_t n) : sid_(sid), n_(n), compiled_(compile_sid(sid))
    {
        for (const auto& label : sid.alphabet) {
            std::vector<std::size_t> tuple(static_cast<std::size_t>(label.arity), 0);
            while (true) {
                if (edge_index_.size() >= 64) {
                    throw Error(ErrorKind::TooLarge, "vertex universe admits more than 64 edges");
                }
                Mask t = 0;
                for (std::size_t v : tuple) {
                    t |= Mask{1} << v;
                }
                edge_index_.emplace(std::make_pair(label.name, tuple), edges_.size());
                edges_.push_back({label, tuple});
                touch_.push_back(t);
                if (!next_tuple(tuple)) {
                    break;
                }
            }
        }
        table_.resize(compiled_.pred_names.size());
    }

    std::set<Mask> run(const std::string& pred)
    {
        auto it = compiled_.pred_index.find(pred);
        if (it == compiled_.pred_index.end()) {
            throw Error(ErrorKind::UndeclaredSymbol, "unknown predicate " + pred);
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t p = 0; p < compiled_.pred_names.size(); ++p) {
                const std::size_t ar = sid_.arity(compiled_.pred_names[p]);
                std::vector<std::size_t> args(ar, 0);
                while (true) {
                    for (const auto& rule : compiled_.rules[p]) {
                        std::vector<long> frame(rule.num_slots, kUnbound);
                        for (std::size_t i = 0; i < ar; ++i) {
                            frame[i] = static_cast<long>(args[i]);
                        }
                        for (Mask m : eval(rule.body, frame)) {
                            if (table_[p][args].insert(m).second) {
                                changed = true;
                            }
                        }
                    }
                    if (!next_tuple(args)) {
                        break;
                    }
                }
            }
        }
        return table_[it->second][{}];
    }

    CGraph to_graph(Mask m) const
    {
        CGraph g;
        std::map<std::size_t, std::size_t> vertex;
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            if (!((m >> e) & 1U)) {
                continue;
            }
            std::vector<std::size_t> attach;
            for (std::size_t v : edges_[e].second) {
                auto it = vertex.find(v);
                if (it == vertex.end()) {
                    it = vertex.emplace(v, g.add_vertex("v" + std::to_string(v))).first;
                }
                attach.push_back(it->second);
            }
            g.add_edge("e" + std::to_string(e), edges_[e].first, std::move(attach));
        }
        return g;
    }

private:
    bool next_tuple(std::vector<std::size_t>& t) const
    {
        for (std::size_t i = t.size(); i-- > 0;) {
            if (++t[i] < n_) {
                return true;
            }
            t[i] = 0;
        }
        return false;
    }

    Mask touched(Mask m) const
    {
        Mask out = 0;
        for (std::size_t e = 0; e < touch_.size(); ++e) {
            if ((m >> e) & 1U) {
                out |= touch_[e];
            }
        }
        return out;
    }

    static std::set<Mask> join(const std::set<Mask>& a, const std::set<Mask>& b)
    {
        std::set<Mask> out;
        for (Mask x : a) {
            for (Mask y : b) {
                if ((x & y) == 0) {
                    out.insert(x | y);
                }
            }
        }
        return out;
    }

    std::set<Mask> eval(const CBlock& block, std::vector<long>& frame)
    {
        std::vector<std::size_t> open;
        for (std::size_t s : block.exists) {
            if (frame[s] == kUnbound) {
                open.push_back(s);
            }
        }
        std::set<Mask> out;
        bind(block, open, 0, frame, out);
        for (std::size_t s : open) {
            frame[s] = kUnbound;
        }
        return out;
    }

    void bind(const CBlock& block, const std::vector<std::size_t>& open, std::size_t k, std::vector<long>& frame,
              std::set<Mask>& out)
    {
        if (k < open.size()) {
            for (std::size_t v = 0; v < n_; ++v) {
                frame[open[k]] = static_cast<long>(v);
                bind(block, open, k + 1, frame, out);
            }
            return;
        }
        for (auto [a, b] : block.eqs) {
            if (frame[a] != frame[b]) {
                return;
            }
        }
        for (auto [a, b] : block.neqs) {
            if (frame[a] == frame[b]) {
                return;
            }
        }
        Mask fixed = 0;
        for (const auto& rel : block.rels) {
            std::vector<std::size_t> tuple;
            for (std::size_t s : rel.args) {
                tuple.push_back(static_cast<std::size_t>(frame[s]));
            }
            const Mask bit = Mask{1} << edge_index_.at({rel.label, tuple});
            if (fixed & bit) {
                return;
            }
            fixed |= bit;
        }
        std::set<Mask> acc{fixed};
        for (const auto& p : block.preds) {
            std::vector<std::size_t> args;
            for (std::size_t s : p.args) {
                args.push_back(static_cast<std::size_t>(frame[s]));
            }
            auto it = table_[p.pred].find(args);
            if (it == table_[p.pred].end()) {
                return;
            }
            acc = join(acc, it->second);
            if (acc.empty()) {
                return;
            }
        }
        for (const auto& sub : block.subs) {
            acc = join(acc, eval(sub, frame));
            if (acc.empty()) {
                return;
            }
        }
        Mask need = 0;
        for (std::size_t s : block.exists) {
            need |= Mask{1} << frame[s];
        }
        for (Mask m : acc) {
            if ((touched(m) & need) == need) {
                out.insert(m);
            }
        }
    }

    const Sid& sid_;
    std::size_t n_;
    CompiledSid compiled_;
    std::vector<std::pair<Label, std::vector<std::size_t>>> edges_;
    std::map<std::pair<std::string, std::vector<std::size_t>>, std::size_t> edge_index_;
    std::vector<Mask> touch_;
    std::vector<std::map<std::vector<std::size_t>, std::set<Mask>>> table_;
};

} // namespace

GraphSet enumerate_models_bruteforce(const Sid& sid, const std::string& pred, std::size_t max_vertices)
{
    if (sid.arity(pred) != 0) {
        throw Error(ErrorKind::ArityMismatch, "model enumeration needs a nullary predicate");
    }
    FixpointEnumerator fp(sid, max_vertices);
    GraphSet out;
    for (Mask m : fp.run(pred)) {
        out.insert(fp.to_graph(m));
    }
    return out;
}

} // namespace slrkit
