#include "slrkit/analysis.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>

#include "slrkit/error.hpp"
#include "slrkit/fusion.hpp"
#include "slrkit/grammar.hpp"
#include "slrkit/regular.hpp"
#include "slrkit/slr_semantics.hpp"

namespace slrkit {

std::size_t Cfg::terminal_index(const std::string& rule) const
{
    auto it = std::find(terminals.begin(), terminals.end(), rule);
    if (it == terminals.end()) {
        throw Error(ErrorKind::UnknownRule, "no productive rule " + rule);
    }
    return static_cast<std::size_t>(it - terminals.begin());
}

Cfg sid_to_cfg(const Sid& sid, const std::string& start)
{
    require_regular(sid);
    if (!sid.predicates.count(start)) {
        throw Error(ErrorKind::UndeclaredSymbol, "unknown predicate " + start);
    }
    Cfg cfg;
    std::map<std::string, std::size_t> nt;
    for (const auto& [p, arity] : sid.predicates) {
        nt.emplace(p, cfg.nonterminals.size());
        cfg.nonterminals.push_back(p);
    }
    std::vector<RuleShape> shapes;
    for (const auto& r : sid.rules) {
        shapes.push_back(rule_shape(r));
        if (is_productive_form(shapes.back().form)) {
            cfg.terminals.push_back(r.id);
        }
    }
    for (std::size_t i = 0; i < sid.rules.size(); ++i) {
        const Rule& r = sid.rules[i];
        const RuleShape& s = shapes[i];
        Cfg::Production p;
        p.lhs = nt.at(r.head);
        p.rule = r.id;
        switch (s.form) {
        case RuleForm::SingleAtom:
        case RuleForm::Productive:
            p.rhs.push_back({true, cfg.terminal_index(r.id)});
            for (const auto& c : s.calls) {
                p.rhs.push_back({false, nt.at(c.name)});
            }
            break;
        case RuleForm::Recursive: {
            const auto& other = s.calls[0].name == r.head ? s.calls[1] : s.calls[0];
            p.rhs.push_back({false, nt.at(r.head)});
            p.rhs.push_back({false, nt.at(other.name)});
            break;
        }
        case RuleForm::Union:
            for (const auto& c : s.calls) {
                p.rhs.push_back({false, nt.at(c.name)});
            }
            break;
        }
        cfg.productions.push_back(std::move(p));
    }
    cfg.start = nt.at(start);
    return cfg;
}

namespace {

bool leq(const Vec& a, const Vec& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) {
            return false;
        }
    }
    return true;
}

bool is_zero(const Vec& v)
{
    return std::all_of(v.begin(), v.end(), [](long x) { return x == 0; });
}

long weight(const Vec& v)
{
    return std::accumulate(v.begin(), v.end(), 0L);
}

// Whether w is a sum of generators.
bool in_monoid(const Vec& w, const std::vector<Vec>& gens)
{
    std::set<Vec> failed;
    std::function<bool(const Vec&)> go = [&](const Vec& r) {
        if (is_zero(r)) {
            return true;
        }
        if (failed.count(r)) {
            return false;
        }
        for (const auto& g : gens) {
            if (is_zero(g) || !leq(g, r)) {
                continue;
            }
            Vec next = r;
            for (std::size_t i = 0; i < next.size(); ++i) {
                next[i] -= g[i];
            }
            if (go(next)) {
                return true;
            }
        }
        failed.insert(r);
        return false;
    };
    return go(w);
}

using Mask = std::uint64_t;
using Item = std::pair<Vec, Mask>;
using ItemSet = std::set<Item>;

class ParikhBuilder {
public:
    explicit ParikhBuilder(const Cfg& cfg) : cfg_(cfg), n_(cfg.nonterminals.size()), m_(cfg.terminals.size())
    {
        if (n_ > 63) {
            throw Error(ErrorKind::TooLarge, "too many nonterminals for the Parikh construction");
        }
        by_lhs_.resize(n_);
        for (const auto& p : cfg.productions) {
            by_lhs_[p.lhs].push_back(&p);
        }
        std::vector<bool> seen(n_, false);
        std::vector<std::size_t> stack{cfg.start};
        seen[cfg.start] = true;
        while (!stack.empty()) {
            const std::size_t x = stack.back();
            stack.pop_back();
            for (const auto* p : by_lhs_[x]) {
                for (const auto& s : p->rhs) {
                    if (!s.terminal && !seen[s.index]) {
                        seen[s.index] = true;
                        stack.push_back(s.index);
                    }
                }
            }
        }
        cap_ = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
    }

    SemilinearSet build()
    {
        ItemSet skeletons = yield(cfg_.start, std::vector<unsigned char>(n_, 0));
        if (skeletons.empty()) {
            throw Error(ErrorKind::EmptyLanguage, "no derivation from " + cfg_.nonterminals[cfg_.start]);
        }
        std::vector<ItemSet> pumps(n_);
        for (std::size_t a = 0; a < n_; ++a) {
            pumps[a] = context(a, Mask{1} << a, a);
        }
        std::set<std::pair<Vec, std::vector<Vec>>> linear;
        for (const auto& [base, used] : skeletons) {
            std::set<Vec> gens;
            for (std::size_t a = 0; a < n_; ++a) {
                if (!((used >> a) & 1U)) {
                    continue;
                }
                for (const auto& [g, gm] : pumps[a]) {
                    if ((gm & ~used) == 0 && !is_zero(g)) {
                        gens.insert(g);
                    }
                }
            }
            linear.emplace(base, reduce_generators(gens));
        }
        std::vector<LinearSet> sets;
        for (const auto& [b, g] : linear) {
            sets.push_back(LinearSet{b, g});
        }
        std::stable_sort(sets.begin(), sets.end(), [](const LinearSet& a, const LinearSet& b) {
            return std::make_pair(weight(a.base), a.base) < std::make_pair(weight(b.base), b.base);
        });
        std::vector<bool> removed(sets.size(), false);
        for (std::size_t i = sets.size(); i-- > 0;) {
            for (std::size_t j = 0; j < sets.size(); ++j) {
                if (j != i && !removed[j] && subsumed(sets[i], sets[j])) {
                    removed[i] = true;
                    break;
                }
            }
        }
        SemilinearSet out;
        out.dimension = m_;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (!removed[i]) {
                out.sets.push_back(std::move(sets[i]));
            }
        }
        return out;
    }

private:
    static std::vector<Vec> reduce_generators(const std::set<Vec>& gens)
    {
        std::vector<Vec> sorted(gens.begin(), gens.end());
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const Vec& a, const Vec& b) { return weight(a) < weight(b); });
        std::vector<Vec> kept;
        for (const auto& g : sorted) {
            if (!in_monoid(g, kept)) {
                kept.push_back(g);
            }
        }
        std::sort(kept.begin(), kept.end());
        return kept;
    }

    static bool subsumed(const LinearSet& small, const LinearSet& big)
    {
        if (!big.contains(small.base)) {
            return false;
        }
        return std::all_of(small.generators.begin(), small.generators.end(),
                           [&](const Vec& g) { return in_monoid(g, big.generators); });
    }

    Item terminal_item(const Cfg::Production& p, std::size_t lhs) const
    {
        Item item{Vec(m_, 0), Mask{1} << lhs};
        for (const auto& s : p.rhs) {
            if (s.terminal) {
                ++item.first[s.index];
            }
        }
        return item;
    }

    static ItemSet combine(const ItemSet& left, const ItemSet& right)
    {
        ItemSet out;
        for (const auto& [v, m] : left) {
            for (const auto& [w, n] : right) {
                Vec sum = v;
                for (std::size_t i = 0; i < sum.size(); ++i) {
                    sum[i] += w[i];
                }
                out.emplace(std::move(sum), m | n);
            }
        }
        return out;
    }

    // Complete trees from x; along every path each nonterminal occurs at most cap_ times.
    const ItemSet& yield(std::size_t x, std::vector<unsigned char> counts)
    {
        auto key = std::make_pair(x, counts);
        if (auto it = yield_memo_.find(key); it != yield_memo_.end()) {
            return it->second;
        }
        ItemSet out;
        if (counts[x] < cap_) {
            ++counts[x];
            for (const auto* p : by_lhs_[x]) {
                ItemSet acc{terminal_item(*p, x)};
                for (const auto& s : p->rhs) {
                    if (s.terminal) {
                        continue;
                    }
                    acc = combine(acc, yield(s.index, counts));
                    if (acc.empty()) {
                        break;
                    }
                }
                out.insert(acc.begin(), acc.end());
            }
        }
        return yield_memo_.emplace(std::move(key), std::move(out)).first->second;
    }

    // Complete trees from x without a repeated nonterminal on any path.
    const ItemSet& distinct(std::size_t x, Mask visited)
    {
        auto key = std::make_pair(x, visited);
        if (auto it = distinct_memo_.find(key); it != distinct_memo_.end()) {
            return it->second;
        }
        ItemSet out;
        if (!((visited >> x) & 1U)) {
            const Mask inner = visited | (Mask{1} << x);
            for (const auto* p : by_lhs_[x]) {
                ItemSet acc{terminal_item(*p, x)};
                for (const auto& s : p->rhs) {
                    if (!s.terminal) {
                        acc = combine(acc, distinct(s.index, inner));
                        if (acc.empty()) {
                            break;
                        }
                    }
                }
                out.insert(acc.begin(), acc.end());
            }
        }
        return distinct_memo_.emplace(key, std::move(out)).first->second;
    }

    // Contexts from spine node x (already in visited) down to a foot labelled a.
    ItemSet context(std::size_t x, Mask visited, std::size_t a)
    {
        ItemSet out;
        for (const auto* p : by_lhs_[x]) {
            for (std::size_t i = 0; i < p->rhs.size(); ++i) {
                const auto& spine = p->rhs[i];
                if (spine.terminal) {
                    continue;
                }
                ItemSet acc{terminal_item(*p, x)};
                if (spine.index == a) {
                    acc = combine(acc, ItemSet{Item{Vec(m_, 0), Mask{1} << a}});
                } else if ((visited >> spine.index) & 1U) {
                    continue;
                } else {
                    acc = combine(acc, context(spine.index, visited | (Mask{1} << spine.index), a));
                }
                for (std::size_t j = 0; j < p->rhs.size() && !acc.empty(); ++j) {
                    if (j != i && !p->rhs[j].terminal) {
                        acc = combine(acc, distinct(p->rhs[j].index, 0));
                    }
                }
                out.insert(acc.begin(), acc.end());
            }
        }
        return out;
    }

    const Cfg& cfg_;
    std::size_t n_;
    std::size_t m_;
    std::size_t cap_ = 0;
    std::vector<std::vector<const Cfg::Production*>> by_lhs_;
    std::map<std::pair<std::size_t, std::vector<unsigned char>>, ItemSet> yield_memo_;
    std::map<std::pair<std::size_t, Mask>, ItemSet> distinct_memo_;
};

} // namespace

bool LinearSet::contains(const Vec& v) const
{
    if (v.size() != base.size() || !leq(base, v)) {
        return false;
    }
    Vec w = v;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] -= base[i];
    }
    return in_monoid(w, generators);
}

bool SemilinearSet::contains(const Vec& v) const
{
    return std::any_of(sets.begin(), sets.end(), [&](const LinearSet& l) { return l.contains(v); });
}

SemilinearSet parikh_image(const Cfg& cfg)
{
    return ParikhBuilder(cfg).build();
}

bool is_pumping(const SemilinearSet& image, const Cfg& cfg, const std::set<std::string>& rules)
{
    if (rules.empty()) {
        throw Error(ErrorKind::UnknownRule, "pumping sets are nonempty");
    }
    std::vector<std::size_t> coords;
    for (const auto& r : rules) {
        coords.push_back(cfg.terminal_index(r));
    }
    return std::any_of(image.sets.begin(), image.sets.end(), [&](const LinearSet& l) {
        return std::all_of(coords.begin(), coords.end(), [&](std::size_t c) {
            return std::any_of(l.generators.begin(), l.generators.end(), [&](const Vec& g) { return g[c] > 0; });
        });
    });
}

bool is_pumping(const Sid& sid, const std::string& pred, const std::set<std::string>& rules)
{
    const Cfg cfg = sid_to_cfg(sid, pred);
    for (const auto& r : rules) {
        cfg.terminal_index(r);
    }
    try {
        return is_pumping(parikh_image(cfg), cfg, rules);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::EmptyLanguage) {
            return false;
        }
        throw;
    }
}

std::map<std::string, std::set<std::string>> coloring(const SlrFormula& psi)
{
    std::map<std::string, std::set<std::string>> col;
    for (const auto& x : free_vars(psi)) {
        col[x];
    }
    for (const auto& a : sep_operands(psi)) {
        if (a.kind == SlrFormula::Kind::Rel && !a.args.empty() &&
            std::all_of(a.args.begin(), a.args.end(), [&](const std::string& z) { return z == a.args.front(); })) {
            col[a.args.front()].insert(a.name);
        }
    }
    return col;
}

namespace {

SlrFormula qpf_part(const RuleShape& shape)
{
    return SlrFormula::sep(shape.qpf);
}

// Existentials of the rule occurring in its largest qpf subformula.
std::vector<std::string> qpf_existentials(const RuleShape& shape)
{
    const auto fv = free_vars(qpf_part(shape));
    std::vector<std::string> out;
    for (const auto& y : shape.exists) {
        if (fv.count(y)) {
            out.push_back(y);
        }
    }
    return out;
}

} // namespace

std::size_t rule_size(const Rule& rule)
{
    return qpf_existentials(rule_shape(rule)).size();
}

RigidityReport check_rigid(const Sid& sid, const std::string& pred, bool all_subsets)
{
    const Cfg cfg = sid_to_cfg(sid, pred);
    if (!is_equality_free(sid)) {
        throw Error(ErrorKind::NotEqualityFree, "rigidity is defined for equality-free SIDs");
    }
    RigidityReport report;
    std::map<std::string, RuleShape> shapes;
    for (const auto& r : cfg.terminals) {
        shapes.emplace(r, rule_shape(*sid.find_rule(r)));
        report.colorings[r] = coloring(qpf_part(shapes.at(r)));
    }
    SemilinearSet image;
    try {
        image = parikh_image(cfg);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptyLanguage) {
            throw;
        }
        return report;
    }
    std::set<std::pair<std::string, std::string>> checked;
    auto check_pair = [&](const std::string& r1, const std::string& r2) {
        if (!checked.emplace(std::min(r1, r2), std::max(r1, r2)).second) {
            return;
        }
        const auto& c1 = report.colorings.at(r1);
        const auto& c2 = report.colorings.at(r2);
        for (const auto& y1 : qpf_existentials(shapes.at(r1))) {
            for (const auto& y2 : qpf_existentials(shapes.at(r2))) {
                const auto& a = c1.at(y1);
                const auto& b = c2.at(y2);
                const bool meet = std::any_of(a.begin(), a.end(), [&](const std::string& l) { return b.count(l); });
                if (!meet) {
                    report.rigid = false;
                    report.violations.push_back({r1, r2, y1, y2});
                }
            }
        }
    };
    const auto& rules = cfg.terminals;
    if (all_subsets) {
        if (rules.size() > 16) {
            throw Error(ErrorKind::TooLarge, "too many productive rules for subset enumeration");
        }
        for (std::uint32_t mask = 1; mask < (1U << rules.size()); ++mask) {
            std::set<std::string> subset;
            for (std::size_t i = 0; i < rules.size(); ++i) {
                if ((mask >> i) & 1U) {
                    subset.insert(rules[i]);
                }
            }
            if (!is_pumping(image, cfg, subset)) {
                continue;
            }
            report.pumping.push_back(subset);
            for (const auto& r1 : subset) {
                for (const auto& r2 : subset) {
                    check_pair(r1, r2);
                }
            }
        }
        return report;
    }
    for (std::size_t i = 0; i < rules.size(); ++i) {
        for (std::size_t j = i; j < rules.size(); ++j) {
            std::set<std::string> pair{rules[i], rules[j]};
            if (is_pumping(image, cfg, pair)) {
                report.pumping.push_back(pair);
                check_pair(rules[i], rules[j]);
            }
        }
    }
    return report;
}

namespace {

BoundsReport bounds_of(const Sid& sid, const std::string& pred)
{
    const auto rigid = check_rigid(sid, pred);
    if (!rigid.rigid) {
        const auto& v = rigid.violations.front();
        throw Error(ErrorKind::NotRigid, "existentials " + v.var1 + " of " + v.rule1 + " and " + v.var2 + " of " +
                                             v.rule2 + " have disjoint colors");
    }
    const Cfg cfg = sid_to_cfg(sid, pred);
    BoundsReport report;
    report.coordinates = cfg.terminals;
    try {
        report.image = parikh_image(cfg);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptyLanguage) {
            throw;
        }
    }
    for (const auto& l : report.image.sets) {
        report.max_base = std::max(report.max_base, weight(l.base));
    }
    for (const auto& r : sid.rules) {
        const RuleShape shape = rule_shape(r);
        if (!is_productive_form(shape.form)) {
            continue;
        }
        report.sizes[r.id] = rule_size(r);
        report.max_size = std::max(report.max_size, static_cast<long>(report.sizes[r.id]));
        const long vars = static_cast<long>(r.params.size() + shape.exists.size());
        report.K = std::max(report.K, vars - 1);
    }
    report.B = report.max_base * report.max_size;
    report.tw_bound = report.K + report.B;
    return report;
}

} // namespace

long fusion_bound_B(const Sid& sid, const std::string& pred)
{
    return bounds_of(sid, pred).B;
}

BoundsReport treewidth_bound(const Sid& sid, const std::string& pred)
{
    return bounds_of(is_equality_free(sid) ? sid : equality_eliminate(sid), pred);
}

std::size_t max_simple_edges(const Alphabet& alphabet, std::size_t n)
{
    std::size_t total = 0;
    for (const auto& a : alphabet) {
        if (a.name == kDisequalityName) {
            continue;
        }
        std::size_t k = 1;
        for (int i = 0; i < a.arity; ++i) {
            k *= n;
        }
        total += k;
    }
    return total;
}

namespace {

bool has_isolated_vertex(const CGraph& g)
{
    const auto t = g.touched();
    return std::find(t.begin(), t.end(), false) != t.end();
}

} // namespace

std::vector<CGraph> models_in_order(const Sid& sid, const std::string& pred, std::size_t max_vertices)
{
    const Sid base = is_equality_free(sid) ? sid : equality_eliminate(sid);
    if (base.arity(pred) != 0) {
        throw Error(ErrorKind::ArityMismatch, "models are defined for nullary predicates");
    }
    const std::size_t cutoff = max_simple_edges(base.alphabet, max_vertices);
    GraphSet seen;
    std::vector<CGraph> out;
    auto emit = [&](const CGraph& g) {
        if (g.num_vertices() <= max_vertices && !has_isolated_vertex(g) && seen.insert(g)) {
            out.push_back(g);
        }
    };
    for (const auto& t : enumerate_parse_trees(base, pred, cutoff)) {
        auto rich = rich_canonical_model(base, t);
        if (!rich) {
            continue;
        }
        const CGraph canonical = project(rich->graph, base.alphabet);
        if (canonical.num_edges() > cutoff) {
            continue;
        }
        emit(canonical);
        for (const auto& f : fusion_up_to(rich->graph, max_vertices).graphs()) {
            emit(project(f, base.alphabet));
        }
    }
    return out;
}

GraphSet models_up_to(const Sid& sid, const std::string& pred, std::size_t max_vertices)
{
    GraphSet out;
    for (const auto& g : models_in_order(sid, pred, max_vertices)) {
        out.insert(g);
    }
    return out;
}

EntailmentResult entails(const Sid& sid, const std::string& lhs, const std::string& rhs, std::size_t max_vertices,
                         std::optional<std::size_t> fuel)
{
    require_regular(sid);
    for (const auto& p : {lhs, rhs}) {
        if (!sid.predicates.count(p)) {
            throw Error(ErrorKind::UndeclaredSymbol, "unknown predicate " + p);
        }
        if (sid.arity(p) != 0) {
            throw Error(ErrorKind::ArityMismatch, "entailment is checked between nullary predicates");
        }
    }
    EntailmentResult result;
    result.bound = max_vertices;
    const SlrFormula goal = SlrFormula::pred(rhs, {});
    for (const auto& g : models_in_order(sid, lhs, max_vertices)) {
        if (slr_models(g, {}, goal, sid, fuel) == Verdict::FalseAtFuel) {
            result.counterexample = g;
            return result;
        }
    }
    return result;
}

} // namespace slrkit
