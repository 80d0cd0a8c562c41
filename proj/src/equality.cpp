#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "slrkit/error.hpp"
#include "slrkit/slr.hpp"

namespace slrkit {

namespace {

bool formula_equality_free(const SlrFormula& f)
{
    using K = SlrFormula::Kind;
    if (f.kind == K::Eq) {
        return false;
    }
    if (f.kind == K::Pred) {
        std::set<std::string> distinct(f.args.begin(), f.args.end());
        if (distinct.size() != f.args.size()) {
            return false;
        }
    }
    return std::all_of(f.children.begin(), f.children.end(), formula_equality_free);
}

// Restricted growth string: block index of each position, blocks numbered by first occurrence.
using Pattern = std::vector<std::size_t>;

Pattern normalize(const std::vector<std::size_t>& raw)
{
    std::map<std::size_t, std::size_t> renumber;
    Pattern out;
    for (std::size_t x : raw) {
        auto it = renumber.find(x);
        if (it == renumber.end()) {
            it = renumber.emplace(x, renumber.size()).first;
        }
        out.push_back(it->second);
    }
    return out;
}

std::size_t blocks(const Pattern& p)
{
    return p.empty() ? 0 : *std::max_element(p.begin(), p.end()) + 1;
}

std::string variant_name(const std::string& pred, const Pattern& p)
{
    if (blocks(p) == p.size()) {
        return pred;
    }
    std::string out = pred + "_";
    for (std::size_t b : p) {
        out += "_" + std::to_string(b);
    }
    return out;
}

struct FlatRule {
    std::string head;
    std::vector<std::string> params;
    std::vector<std::string> exists;
    std::vector<SlrFormula> atoms;
};

// Hoists every quantifier to the front, renaming bound variables apart.
void flatten(const SlrFormula& f, std::map<std::string, std::string>& names, std::set<std::string>& used,
             FlatRule& out)
{
    using K = SlrFormula::Kind;
    switch (f.kind) {
    case K::Sep:
        for (const auto& c : f.children) {
            flatten(c, names, used, out);
        }
        return;
    case K::Exists: {
        std::string fresh = f.name;
        for (std::size_t i = 1; used.count(fresh); ++i) {
            fresh = f.name + "_" + std::to_string(i);
        }
        used.insert(fresh);
        out.exists.push_back(fresh);
        auto saved = names.find(f.name) != names.end() ? std::optional<std::string>(names[f.name]) : std::nullopt;
        names[f.name] = fresh;
        flatten(f.children.front(), names, used, out);
        if (saved) {
            names[f.name] = *saved;
        } else {
            names.erase(f.name);
        }
        return;
    }
    case K::Emp:
        return;
    default: {
        SlrFormula a = f;
        for (auto& x : a.args) {
            if (auto it = names.find(x); it != names.end()) {
                x = it->second;
            }
        }
        out.atoms.push_back(std::move(a));
        return;
    }
    }
}

class Eliminator {
public:
    explicit Eliminator(const Sid& sid) : sid_(sid)
    {
        for (const auto& r : sid.rules) {
            FlatRule fr;
            fr.head = r.head;
            fr.params = r.params;
            std::map<std::string, std::string> names;
            std::set<std::string> used(r.params.begin(), r.params.end());
            flatten(r.body, names, used, fr);
            rules_.push_back(std::move(fr));
        }
        compute_requirements();
    }

    Sid run()
    {
        Sid out;
        out.alphabet = sid_.alphabet;
        std::deque<std::pair<std::string, Pattern>> work;
        std::set<std::pair<std::string, Pattern>> queued;
        auto need = [&](const std::string& pred, const Pattern& p) {
            if (queued.insert({pred, p}).second) {
                work.emplace_back(pred, p);
            }
        };
        for (const auto& [name, ar] : sid_.predicates) {
            Pattern identity(ar);
            for (std::size_t i = 0; i < ar; ++i) {
                identity[i] = i;
            }
            need(name, identity);
        }
        std::set<std::string> emitted;
        while (!work.empty()) {
            auto [pred, tau] = work.front();
            work.pop_front();
            const std::string name = variant_name(pred, tau);
            out.predicates.emplace(name, blocks(tau));
            for (const auto& fr : rules_) {
                if (fr.head != pred) {
                    continue;
                }
                for_each_instance(fr, tau, [&](Rule rule, const std::vector<std::pair<std::string, Pattern>>& calls) {
                    for (const auto& c : calls) {
                        need(c.first, c.second);
                    }
                    rule.head = name;
                    const std::string text = to_string(rule.body) + "|" + std::to_string(rule.params.size());
                    if (emitted.insert(name + "|" + text).second) {
                        out.rules.push_back(std::move(rule));
                    }
                });
            }
        }
        finalize_sid(out);
        return out;
    }

private:
    struct Closure {
        std::map<std::string, std::string> parent;
        std::string find(const std::string& x)
        {
            auto it = parent.find(x);
            if (it == parent.end() || it->second == x) {
                return x;
            }
            std::string root = find(it->second);
            parent[x] = root;
            return root;
        }
        void join(const std::string& a, const std::string& b)
        {
            std::string ra = find(a);
            std::string rb = find(b);
            if (ra != rb) {
                parent[ra] = rb;
            }
        }
    };

    // Visits choices of one requirement per predicate atom.
    template <class F>
    void for_each_choice(const FlatRule& fr, std::size_t i, std::vector<const Pattern*>& chosen, F&& visit)
    {
        if (i == fr.atoms.size()) {
            visit(chosen);
            return;
        }
        if (fr.atoms[i].kind != SlrFormula::Kind::Pred) {
            chosen.push_back(nullptr);
            for_each_choice(fr, i + 1, chosen, visit);
            chosen.pop_back();
            return;
        }
        for (const auto& p : requirements_[fr.atoms[i].name]) {
            chosen.push_back(&p);
            for_each_choice(fr, i + 1, chosen, visit);
            chosen.pop_back();
        }
    }

    // Equality closure of a rule instance; absent when a disequality collapses.
    std::optional<Closure> close(const FlatRule& fr, const Pattern& tau, const std::vector<const Pattern*>& chosen)
    {
        Closure c;
        for (std::size_t i = 0; i < fr.params.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                if (tau[i] == tau[j]) {
                    c.join(fr.params[i], fr.params[j]);
                }
            }
        }
        for (std::size_t k = 0; k < fr.atoms.size(); ++k) {
            const auto& a = fr.atoms[k];
            if (a.kind == SlrFormula::Kind::Eq) {
                c.join(a.args[0], a.args[1]);
            }
            if (a.kind == SlrFormula::Kind::Pred) {
                const Pattern& p = *chosen[k];
                for (std::size_t i = 0; i < a.args.size(); ++i) {
                    for (std::size_t j = 0; j < i; ++j) {
                        if (p[i] == p[j]) {
                            c.join(a.args[i], a.args[j]);
                        }
                    }
                }
            }
        }
        for (const auto& a : fr.atoms) {
            if (a.kind == SlrFormula::Kind::Neq && c.find(a.args[0]) == c.find(a.args[1])) {
                return std::nullopt;
            }
        }
        return c;
    }

    Pattern induced(const FlatRule& fr, Closure& c)
    {
        std::vector<std::size_t> raw;
        std::map<std::string, std::size_t> id;
        for (const auto& p : fr.params) {
            raw.push_back(id.emplace(c.find(p), id.size()).first->second);
        }
        return normalize(raw);
    }

    void compute_requirements()
    {
        for (const auto& [name, ar] : sid_.predicates) {
            requirements_[name];
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& fr : rules_) {
                std::vector<const Pattern*> chosen;
                std::vector<Pattern> found;
                const Pattern discrete = [&] {
                    Pattern p(fr.params.size());
                    for (std::size_t i = 0; i < p.size(); ++i) {
                        p[i] = i;
                    }
                    return p;
                }();
                for_each_choice(fr, 0, chosen, [&](const std::vector<const Pattern*>& ch) {
                    if (auto c = close(fr, discrete, ch)) {
                        found.push_back(induced(fr, *c));
                    }
                });
                for (auto& p : found) {
                    if (requirements_[fr.head].insert(p).second) {
                        changed = true;
                    }
                }
            }
        }
    }

    template <class F>
    void for_each_instance(const FlatRule& fr, const Pattern& tau, F&& emit)
    {
        std::vector<const Pattern*> chosen;
        for_each_choice(fr, 0, chosen, [&](const std::vector<const Pattern*>& ch) {
            auto c = close(fr, tau, ch);
            if (!c || induced(fr, *c) != tau) {
                return;
            }
            std::map<std::string, std::string> rep;
            Rule rule;
            for (std::size_t i = 0; i < fr.params.size(); ++i) {
                const std::string root = c->find(fr.params[i]);
                if (!rep.count(root)) {
                    rep[root] = fr.params[i];
                    rule.params.push_back(fr.params[i]);
                }
            }
            std::vector<std::string> exists;
            for (const auto& y : fr.exists) {
                const std::string root = c->find(y);
                if (!rep.count(root)) {
                    rep[root] = y;
                    exists.push_back(y);
                }
            }
            auto sub = [&](const std::string& x) {
                const std::string root = c->find(x);
                auto it = rep.find(root);
                // Variables occurring only in dropped equalities have no representative.
                return it == rep.end() ? x : it->second;
            };
            std::vector<SlrFormula> atoms;
            std::vector<std::pair<std::string, Pattern>> calls;
            for (const auto& a : fr.atoms) {
                switch (a.kind) {
                case SlrFormula::Kind::Eq:
                case SlrFormula::Kind::Emp:
                    break;
                case SlrFormula::Kind::Neq:
                    atoms.push_back(SlrFormula::neq(sub(a.args[0]), sub(a.args[1])));
                    break;
                case SlrFormula::Kind::Rel: {
                    std::vector<std::string> args;
                    for (const auto& x : a.args) {
                        args.push_back(sub(x));
                    }
                    atoms.push_back(SlrFormula::rel(a.name, std::move(args)));
                    break;
                }
                case SlrFormula::Kind::Pred: {
                    std::vector<std::string> reps;
                    std::vector<std::string> distinct;
                    std::vector<std::size_t> raw;
                    for (const auto& x : a.args) {
                        reps.push_back(sub(x));
                        auto it = std::find(distinct.begin(), distinct.end(), reps.back());
                        raw.push_back(static_cast<std::size_t>(it - distinct.begin()));
                        if (it == distinct.end()) {
                            distinct.push_back(reps.back());
                        }
                    }
                    Pattern sigma = normalize(raw);
                    calls.emplace_back(a.name, sigma);
                    atoms.push_back(SlrFormula::pred(variant_name(a.name, sigma), std::move(distinct)));
                    break;
                }
                default:
                    break;
                }
            }
            // Existentials that only occurred in equalities with other existentials are dropped as well.
            std::set<std::string> mentioned;
            for (const auto& a : atoms) {
                mentioned.insert(a.args.begin(), a.args.end());
            }
            std::vector<std::string> kept;
            for (const auto& y : exists) {
                if (mentioned.count(y)) {
                    kept.push_back(y);
                }
            }
            rule.body = SlrFormula::exists(kept, SlrFormula::sep(std::move(atoms)));
            emit(std::move(rule), calls);
        });
    }

    const Sid& sid_;
    std::vector<FlatRule> rules_;
    std::map<std::string, std::set<Pattern>> requirements_;
};

} // namespace

bool is_equality_free(const Sid& sid)
{
    return std::all_of(sid.rules.begin(), sid.rules.end(),
                       [](const Rule& r) { return formula_equality_free(r.body); });
}

Sid equality_eliminate(const Sid& sid)
{
    return Eliminator(sid).run();
}

} // namespace slrkit
