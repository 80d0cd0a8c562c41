#include "slrkit/grammar.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include <json.hpp>

#include "slrkit/error.hpp"
#include "slrkit/regular.hpp"

namespace slrkit {

namespace {

std::string serialize_edge(const ParseEdge& e);

std::string serialize_vertex(const ParseVertex& v)
{
    std::string s = v.pred + "[";
    for (std::size_t i = 0; i < v.edges.size(); ++i) {
        s += (i ? "," : "") + serialize_edge(v.edges[i]);
    }
    return s + "]";
}

std::string serialize_edge(const ParseEdge& e)
{
    std::string s = e.rule + "(";
    for (std::size_t i = 0; i < e.children.size(); ++i) {
        s += (i ? "," : "") + serialize_vertex(e.children[i]);
    }
    return s + ")";
}

void sort_edges(std::vector<ParseEdge>& edges)
{
    std::vector<std::pair<std::string, ParseEdge>> keyed;
    keyed.reserve(edges.size());
    for (auto& e : edges) {
        keyed.emplace_back(serialize_edge(e), std::move(e));
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    edges.clear();
    for (auto& [k, e] : keyed) {
        edges.push_back(std::move(e));
    }
}

void count_rules(const ParseVertex& v, std::map<std::string, std::size_t>& out)
{
    for (const auto& e : v.edges) {
        ++out[e.rule];
        for (const auto& c : e.children) {
            count_rules(c, out);
        }
    }
}

nlohmann::ordered_json vertex_json(const ParseVertex& v)
{
    nlohmann::ordered_json j;
    j["pred"] = v.pred;
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : v.edges) {
        nlohmann::ordered_json je;
        je["rule"] = e.rule;
        je["children"] = nlohmann::ordered_json::array();
        for (const auto& c : e.children) {
            je["children"].push_back(vertex_json(c));
        }
        j["edges"].push_back(std::move(je));
    }
    return j;
}

} // namespace

std::string serialize(const ParseTree& t)
{
    return serialize_vertex(t);
}

std::size_t productive_edges(const ParseTree& t)
{
    std::size_t n = 0;
    for (const auto& e : t.edges) {
        n += 1;
        for (const auto& c : e.children) {
            n += productive_edges(c);
        }
    }
    return n;
}

std::map<std::string, std::size_t> rule_counts(const ParseTree& t)
{
    std::map<std::string, std::size_t> out;
    count_rules(t, out);
    return out;
}

ParseTree normalize_order(ParseTree t)
{
    for (auto& e : t.edges) {
        for (auto& c : e.children) {
            c = normalize_order(std::move(c));
        }
    }
    sort_edges(t.edges);
    return t;
}

std::string parse_tree_to_json(const ParseTree& t)
{
    return vertex_json(t).dump(2);
}

namespace {

// Unproductive predicate: the union rules as callee lists and the recursive step callees.
struct UnionRules {
    std::vector<std::vector<std::string>> unions;
    std::set<std::string> steps;
};

struct SidView {
    const Sid& sid;
    RegularityReport report;
    std::map<std::string, RuleShape> shapes;
    std::map<std::string, UnionRules> union_rules;

    explicit SidView(const Sid& s) : sid(s), report(require_regular(s))
    {
        for (const auto& r : s.rules) {
            shapes.emplace(r.id, rule_shape(r));
        }
        for (const auto& r : s.rules) {
            const RuleShape& shape = shapes.at(r.id);
            if (report.productive.count(r.head)) {
                continue;
            }
            auto& u = union_rules[r.head];
            if (shape.form == RuleForm::Recursive) {
                u.steps.insert(shape.calls[0].name == r.head ? shape.calls[1].name : shape.calls[0].name);
            } else {
                std::vector<std::string> callees;
                for (const auto& c : shape.calls) {
                    callees.push_back(c.name);
                }
                u.unions.push_back(std::move(callees));
            }
        }
    }

    bool productive(const std::string& p) const { return report.productive.count(p) != 0; }

    std::string head_of(const std::string& rule_id) const { return sid.find_rule(rule_id)->head; }

    // Decomposes the edge predicates into one union rule plus recursive steps.
    bool admits(const std::string& pred, std::vector<std::string> edge_preds) const
    {
        auto it = union_rules.find(pred);
        if (it == union_rules.end()) {
            return false;
        }
        std::sort(edge_preds.begin(), edge_preds.end());
        for (auto u : it->second.unions) {
            std::sort(u.begin(), u.end());
            std::vector<std::string> rest;
            std::set_difference(edge_preds.begin(), edge_preds.end(), u.begin(), u.end(), std::back_inserter(rest));
            if (rest.size() + u.size() != edge_preds.size()) {
                continue;
            }
            if (std::all_of(rest.begin(), rest.end(),
                            [&](const std::string& q) { return it->second.steps.count(q) != 0; })) {
                return true;
            }
        }
        return false;
    }
};

class TreeEnumerator {
public:
    explicit TreeEnumerator(const SidView& view) : view_(view) {}

    const std::vector<ParseTree>& trees(const std::string& pred, std::size_t size)
    {
        auto key = std::make_pair(pred, size);
        if (auto it = memo_.find(key); it != memo_.end()) {
            return it->second;
        }
        std::vector<ParseTree> out = view_.productive(pred) ? productive_trees(pred, size) : union_trees(pred, size);
        std::sort(out.begin(), out.end(),
                  [](const ParseTree& a, const ParseTree& b) { return serialize(a) < serialize(b); });
        return memo_.emplace(key, std::move(out)).first->second;
    }

private:
    std::vector<ParseTree> productive_trees(const std::string& pred, std::size_t size)
    {
        std::vector<ParseTree> out;
        if (size == 0) {
            return out;
        }
        for (const Rule* r : view_.sid.rules_of(pred)) {
            const auto& calls = view_.shapes.at(r->id).calls;
            std::vector<ParseVertex> chosen;
            std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t j, std::size_t remaining) {
                if (j == calls.size()) {
                    if (remaining == 0) {
                        out.push_back(ParseVertex{pred, {ParseEdge{r->id, chosen}}});
                    }
                    return;
                }
                for (std::size_t s = 0; s <= remaining; ++s) {
                    if (j + 1 == calls.size() && s != remaining) {
                        continue;
                    }
                    for (const auto& child : trees(calls[j].name, s)) {
                        chosen.push_back(child);
                        fill(j + 1, remaining - s);
                        chosen.pop_back();
                    }
                }
            };
            fill(0, size - 1);
        }
        return out;
    }

    std::vector<ParseTree> union_trees(const std::string& pred, std::size_t size)
    {
        std::vector<ParseTree> out;
        auto it = view_.union_rules.find(pred);
        if (it == view_.union_rules.end()) {
            return out;
        }
        std::set<std::string> callees(it->second.steps.begin(), it->second.steps.end());
        for (const auto& u : it->second.unions) {
            callees.insert(u.begin(), u.end());
        }
        // Candidate edges: roots of trees of the callees, by size then serialization.
        std::vector<std::pair<std::size_t, ParseEdge>> items;
        for (std::size_t s = 1; s <= size; ++s) {
            std::vector<ParseEdge> level;
            for (const auto& q : callees) {
                for (const auto& t : trees(q, s)) {
                    level.push_back(t.edges.front());
                }
            }
            sort_edges(level);
            for (auto& e : level) {
                items.emplace_back(s, std::move(e));
            }
        }
        std::vector<std::size_t> picked;
        std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t from, std::size_t remaining) {
            if (remaining == 0) {
                std::vector<std::string> preds;
                ParseVertex v{pred, {}};
                for (std::size_t i : picked) {
                    preds.push_back(view_.head_of(items[i].second.rule));
                    v.edges.push_back(items[i].second);
                }
                if (view_.admits(pred, preds)) {
                    sort_edges(v.edges);
                    out.push_back(std::move(v));
                }
                return;
            }
            for (std::size_t i = from; i < items.size(); ++i) {
                if (items[i].first > remaining) {
                    break;
                }
                picked.push_back(i);
                choose(i, remaining - items[i].first);
                picked.pop_back();
            }
        };
        choose(0, size);
        return out;
    }

    const SidView& view_;
    std::map<std::pair<std::string, std::size_t>, std::vector<ParseTree>> memo_;
};

} // namespace

std::vector<ParseTree> enumerate_parse_trees(const Sid& sid, const std::string& pred, std::size_t max_edges)
{
    if (!sid.predicates.count(pred)) {
        throw Error(ErrorKind::UndeclaredSymbol, "unknown predicate " + pred);
    }
    SidView view(sid);
    TreeEnumerator en(view);
    std::vector<ParseTree> out;
    for (std::size_t n = 0; n <= max_edges; ++n) {
        const auto& level = en.trees(pred, n);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

bool is_parse_tree(const Sid& sid, const ParseTree& t)
{
    SidView view(sid);
    std::function<bool(const ParseVertex&)> check = [&](const ParseVertex& v) {
        if (!sid.predicates.count(v.pred)) {
            return false;
        }
        std::vector<std::string> preds;
        for (const auto& e : v.edges) {
            const Rule* r = sid.find_rule(e.rule);
            if (!r || !is_productive_form(view.shapes.at(r->id).form)) {
                return false;
            }
            const auto& calls = view.shapes.at(r->id).calls;
            if (calls.size() != e.children.size()) {
                return false;
            }
            for (std::size_t j = 0; j < calls.size(); ++j) {
                if (e.children[j].pred != calls[j].name || !check(e.children[j])) {
                    return false;
                }
            }
            preds.push_back(r->head);
        }
        if (view.productive(v.pred)) {
            return preds.size() == 1 && preds.front() == v.pred;
        }
        return view.admits(v.pred, preds);
    };
    return check(t);
}

CharFormula char_formula(const Sid& sid, const ParseTree& t)
{
    std::size_t counter = 0;
    std::vector<SlrFormula> atoms;
    std::function<void(const ParseVertex&, const std::vector<std::string>&)> build =
        [&](const ParseVertex& v, const std::vector<std::string>& actual) {
            for (const auto& e : v.edges) {
                const Rule* r = sid.find_rule(e.rule);
                if (!r) {
                    throw Error(ErrorKind::UnknownRule, "unknown rule " + e.rule);
                }
                const std::string tag = "@e" + std::to_string(++counter);
                auto ann = [&](const std::string& x) { return x + tag; };
                for (std::size_t j = 0; j < r->params.size(); ++j) {
                    atoms.push_back(SlrFormula::eq(actual.at(j), ann(r->params[j])));
                }
                const RuleShape shape = rule_shape(*r);
                for (const auto& a : shape.qpf) {
                    SlrFormula b = a;
                    for (auto& x : b.args) {
                        x = ann(x);
                    }
                    atoms.push_back(std::move(b));
                }
                if (shape.calls.size() != e.children.size()) {
                    throw Error(ErrorKind::InvalidGraph, "parse tree edge " + e.rule + " has the wrong arity");
                }
                for (std::size_t j = 0; j < shape.calls.size(); ++j) {
                    std::vector<std::string> args;
                    for (const auto& z : shape.calls[j].args) {
                        args.push_back(ann(z));
                    }
                    build(e.children[j], args);
                }
            }
        };
    CharFormula out;
    for (std::size_t j = 1; j <= sid.arity(t.pred); ++j) {
        out.free.push_back("x" + std::to_string(j));
    }
    build(t, out.free);
    out.formula = SlrFormula::sep(std::move(atoms));
    return out;
}

std::optional<RichCanonicalModel> rich_canonical_model(const Sid& sid, const ParseTree& t)
{
    CharFormula cf = char_formula(sid, t);
    auto sat = sat_qpf(cf.formula);
    if (!sat) {
        return std::nullopt;
    }
    auto& [graph, store] = *sat;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    auto vertex_of = [&](const std::string& x) {
        auto it = store.find(x);
        if (it == store.end()) {
            it = store.emplace(x, graph.add_vertex(graph.fresh_id("v" + std::to_string(graph.num_vertices())))).first;
        }
        return it->second;
    };
    for (const auto& a : sep_operands(cf.formula)) {
        if (a.kind != SlrFormula::Kind::Neq) {
            continue;
        }
        const std::size_t u = vertex_of(a.args[0]);
        const std::size_t v = vertex_of(a.args[1]);
        if (seen.emplace(u, v).second) {
            graph.add_edge(graph.fresh_id("d" + std::to_string(graph.num_edges())), disequality_label(), {u, v});
        }
    }
    return RichCanonicalModel{std::move(graph), t, std::move(store)};
}

CanonicalModels canonical_models(const Sid& sid, const std::string& pred, std::size_t max_edges)
{
    if (!is_equality_free(sid)) {
        throw Error(ErrorKind::NotEqualityFree, "canonical models need an equality-free SID");
    }
    CanonicalModels out;
    for (const auto& t : enumerate_parse_trees(sid, pred, max_edges)) {
        if (auto m = rich_canonical_model(sid, t)) {
            out.rich.insert(m->graph);
            out.projected.insert(project(m->graph, sid.alphabet));
        }
    }
    return out;
}

const HrRule* HrGrammar::find_rule(const std::string& id) const
{
    for (const auto& r : rules) {
        if (r.id == id) {
            return &r;
        }
    }
    return nullptr;
}

GrammarTranslation sid_to_grammar(const Sid& sid)
{
    if (!is_equality_free(sid)) {
        throw Error(ErrorKind::NotEqualityFree, "the grammar translation needs an equality-free SID");
    }
    SidView view(sid);
    GrammarTranslation out;
    out.grammar.nonterminals = sid.predicates;
    for (const auto& r : sid.rules) {
        const RuleShape& shape = view.shapes.at(r.id);
        HrRule hr;
        hr.id = r.id;
        hr.head = r.head;
        hr.productive = is_productive_form(shape.form);
        if (hr.productive) {
            CGraph g;
            for (const auto& x : r.params) {
                g.add_vertex(x);
            }
            for (const auto& y : shape.exists) {
                g.add_vertex(y);
            }
            std::vector<std::size_t> sources;
            for (std::size_t i = 0; i < r.params.size(); ++i) {
                sources.push_back(i);
            }
            g.set_sources(std::move(sources));
            auto attach_of = [&](const SlrFormula& a) {
                std::vector<std::size_t> attach;
                for (const auto& z : a.args) {
                    attach.push_back(*g.find_vertex(z));
                }
                return attach;
            };
            for (const auto& a : shape.qpf) {
                if (a.kind == SlrFormula::Kind::Rel) {
                    g.add_edge(g.fresh_id("t" + std::to_string(g.num_edges())),
                               Label{a.name, static_cast<int>(a.args.size())}, attach_of(a));
                }
            }
            for (const auto& c : shape.calls) {
                const std::string id = g.fresh_id("n" + std::to_string(hr.nonterminal_edges.size()));
                g.add_edge(id, Label{c.name, static_cast<int>(c.args.size())}, attach_of(c));
                hr.nonterminal_edges.push_back(id);
            }
            hr.graph = std::move(g);
        } else {
            for (const auto& c : shape.calls) {
                hr.parts.push_back(c.name);
            }
        }
        out.gamma[r.id] = hr.id;
        out.grammar.rules.push_back(std::move(hr));
    }
    return out;
}

ParseTree translate_tree(const GrammarTranslation& t, const ParseTree& tree)
{
    ParseTree out{tree.pred, {}};
    for (const auto& e : tree.edges) {
        ParseEdge ne{t.gamma.at(e.rule), {}};
        for (const auto& c : e.children) {
            ne.children.push_back(translate_tree(t, c));
        }
        out.edges.push_back(std::move(ne));
    }
    sort_edges(out.edges);
    return out;
}

namespace {

const HrRule& grammar_rule(const HrGrammar& g, const std::string& id)
{
    const HrRule* r = g.find_rule(id);
    if (!r) {
        throw Error(ErrorKind::UnknownRule, "unknown grammar rule " + id);
    }
    return *r;
}

std::vector<ParseEdge> collect_productive(const HrGrammar& g, const DerivationTree& d);

ParseVertex normalized_vertex(const HrGrammar& g, const DerivationTree& d)
{
    ParseVertex v{d.nonterminal, collect_productive(g, d)};
    sort_edges(v.edges);
    return v;
}

std::vector<ParseEdge> collect_productive(const HrGrammar& g, const DerivationTree& d)
{
    const HrRule& r = grammar_rule(g, d.rule);
    if (r.productive) {
        ParseEdge e{r.id, {}};
        for (const auto& c : d.children) {
            e.children.push_back(normalized_vertex(g, c));
        }
        return {std::move(e)};
    }
    std::vector<ParseEdge> out;
    for (const auto& c : d.children) {
        auto part = collect_productive(g, c);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

} // namespace

ParseTree derivation_normalize(const HrGrammar& g, const DerivationTree& d)
{
    return normalized_vertex(g, d);
}

DerivationTree derivation_of(const HrGrammar& g, const ParseTree& t)
{
    auto productive_node = [&](const ParseEdge& e) {
        const HrRule& r = grammar_rule(g, e.rule);
        DerivationTree d{r.head, r.id, {}};
        for (const auto& c : e.children) {
            d.children.push_back(derivation_of(g, c));
        }
        return d;
    };
    std::vector<const HrRule*> own;
    for (const auto& r : g.rules) {
        if (r.head == t.pred) {
            own.push_back(&r);
        }
    }
    if (!own.empty() && own.front()->productive) {
        if (t.edges.size() != 1) {
            throw Error(ErrorKind::InvalidGraph, "productive vertex needs exactly one edge");
        }
        return productive_node(t.edges.front());
    }
    for (const HrRule* u : own) {
        if (u->productive || std::count(u->parts.begin(), u->parts.end(), t.pred) != 0) {
            continue;
        }
        std::vector<bool> used(t.edges.size(), false);
        std::vector<std::size_t> assigned;
        bool ok = true;
        for (const auto& part : u->parts) {
            bool found = false;
            for (std::size_t i = 0; i < t.edges.size() && !found; ++i) {
                if (!used[i] && grammar_rule(g, t.edges[i].rule).head == part) {
                    used[i] = true;
                    assigned.push_back(i);
                    found = true;
                }
            }
            ok = ok && found;
        }
        if (!ok) {
            continue;
        }
        DerivationTree d{t.pred, u->id, {}};
        for (std::size_t i : assigned) {
            d.children.push_back(productive_node(t.edges[i]));
        }
        for (std::size_t i = 0; i < t.edges.size() && ok; ++i) {
            if (used[i]) {
                continue;
            }
            const std::string q = grammar_rule(g, t.edges[i].rule).head;
            const HrRule* step = nullptr;
            for (const HrRule* s : own) {
                if (!s->productive && s->parts.size() == 2 &&
                    ((s->parts[0] == t.pred && s->parts[1] == q) || (s->parts[1] == t.pred && s->parts[0] == q))) {
                    step = s;
                    break;
                }
            }
            if (!step) {
                ok = false;
                break;
            }
            DerivationTree wrapped{t.pred, step->id, {}};
            if (step->parts[0] == t.pred) {
                wrapped.children.push_back(std::move(d));
                wrapped.children.push_back(productive_node(t.edges[i]));
            } else {
                wrapped.children.push_back(productive_node(t.edges[i]));
                wrapped.children.push_back(std::move(d));
            }
            d = std::move(wrapped);
        }
        if (ok) {
            return d;
        }
    }
    throw Error(ErrorKind::InvalidGraph, "no derivation produces the parse tree vertex " + t.pred);
}

CGraph eval_parse_tree(const HrGrammar& g, const ParseTree& t)
{
    std::size_t counter = 0;
    std::function<CGraph(const ParseVertex&)> eval_vertex = [&](const ParseVertex& v) -> CGraph {
        const std::size_t n = g.nonterminals.at(v.pred);
        std::optional<CGraph> acc;
        for (const auto& e : v.edges) {
            const HrRule& r = grammar_rule(g, e.rule);
            if (!r.productive || r.nonterminal_edges.size() != e.children.size()) {
                throw Error(ErrorKind::InvalidGraph, "parse tree edge " + e.rule + " does not fit its rule");
            }
            const std::string prefix = "p" + std::to_string(counter++) + ".";
            CGraph h = prefix_ids(r.graph, prefix);
            for (std::size_t j = 0; j < e.children.size(); ++j) {
                CGraph child = prefix_ids(eval_vertex(e.children[j]), "p" + std::to_string(counter++) + ".");
                h = substitute(h, prefix + r.nonterminal_edges[j], child);
            }
            acc = acc ? parallel(*acc, h, n) : h;
        }
        return acc ? *acc : source_graph(n);
    };
    return eval_vertex(t);
}

} // namespace slrkit
