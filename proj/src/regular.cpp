#include "slrkit/regular.hpp"

#include <algorithm>
#include <numeric>

#include "slrkit/error.hpp"

namespace slrkit {

bool is_productive_form(RuleForm form)
{
    return form == RuleForm::SingleAtom || form == RuleForm::Productive;
}

RuleShape rule_shape(const Rule& rule)
{
    RuleShape shape;
    auto prenex = prenex_body(rule.body);
    if (!prenex) {
        shape.prenex = false;
        shape.form = RuleForm::Productive;
        return shape;
    }
    shape.exists = prenex->exists;
    for (auto& a : prenex->atoms) {
        if (a.kind == SlrFormula::Kind::Pred) {
            shape.calls.push_back(a);
        } else if (a.kind != SlrFormula::Kind::Emp) {
            shape.qpf.push_back(a);
        }
    }
    if (shape.exists.empty() && shape.calls.empty() && shape.qpf.size() == 1 &&
        shape.qpf.front().kind == SlrFormula::Kind::Rel) {
        shape.form = RuleForm::SingleAtom;
        return shape;
    }
    const bool all_forward = std::all_of(shape.calls.begin(), shape.calls.end(),
                                         [&](const SlrFormula& c) { return c.args == rule.params; });
    if (shape.exists.empty() && shape.qpf.empty() && all_forward) {
        const auto self = std::count_if(shape.calls.begin(), shape.calls.end(),
                                        [&](const SlrFormula& c) { return c.name == rule.head; });
        shape.form = (shape.calls.size() == 2 && self >= 1) ? RuleForm::Recursive : RuleForm::Union;
        return shape;
    }
    shape.form = RuleForm::Productive;
    return shape;
}

namespace {

void violate(RegularityReport& report, const Rule& r, std::string condition, std::string message)
{
    report.regular = false;
    report.violations.push_back({r.id, std::move(condition), std::move(message)});
}

void check_productive(const Rule& r, const RuleShape& shape, RegularityReport& report)
{
    if (!shape.prenex) {
        violate(report, r, "2", "quantifier below a separating conjunction");
        return;
    }
    const std::set<std::string> existentials(shape.exists.begin(), shape.exists.end());
    for (const auto& c : shape.calls) {
        const bool anchored = std::any_of(c.args.begin(), c.args.end(),
                                          [&](const std::string& z) { return existentials.count(z) != 0; });
        if (!anchored) {
            violate(report, r, "2a", "predicate atom " + to_string(c) + " has no existential argument");
            return;
        }
    }
    std::vector<std::string> vars = r.params;
    vars.insert(vars.end(), shape.exists.begin(), shape.exists.end());
    if (vars.size() < 2) {
        return;
    }
    std::map<std::string, std::size_t> index;
    for (const auto& v : vars) {
        index.emplace(v, index.size());
    }
    std::vector<std::size_t> parent(index.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    std::vector<bool> in_atom(index.size(), false);
    for (const auto& a : shape.qpf) {
        if (a.kind != SlrFormula::Kind::Rel) {
            continue;
        }
        const std::size_t first = index.at(a.args.front());
        for (const auto& z : a.args) {
            in_atom[index.at(z)] = true;
            parent[find(index.at(z))] = find(first);
        }
    }
    for (const auto& [v, i] : index) {
        if (!in_atom[i] || find(i) != find(0)) {
            violate(report, r, "2b", "variable " + v + " is not connected to " + vars.front() +
                                         " through relation atoms");
            return;
        }
    }
}

} // namespace

RegularityReport check_regular(const Sid& sid)
{
    RegularityReport report;
    std::map<std::string, RuleShape> shapes;
    for (const auto& r : sid.rules) {
        shapes.emplace(r.id, rule_shape(r));
        report.forms[r.id] = shapes.at(r.id).form;
    }
    for (const auto& [pred, arity] : sid.predicates) {
        bool decided = false;
        for (const Rule* r : sid.rules_of(pred)) {
            const RuleShape& s = shapes.at(r->id);
            if (s.form == RuleForm::Union && s.calls.empty()) {
                continue;
            }
            (is_productive_form(s.form) ? report.productive : report.unproductive).insert(pred);
            decided = true;
            break;
        }
        if (!decided) {
            report.unproductive.insert(pred);
        }
    }
    for (const auto& r : sid.rules) {
        const RuleShape& s = shapes.at(r.id);
        const bool head_productive = report.productive.count(r.head) != 0;
        switch (s.form) {
        case RuleForm::SingleAtom:
            if (!head_productive) {
                violate(report, r, "1", "single-atom rule for the unproductive predicate " + r.head);
            }
            break;
        case RuleForm::Productive:
            if (!head_productive) {
                violate(report, r, "2", "productive rule for the unproductive predicate " + r.head);
            } else {
                check_productive(r, s, report);
            }
            break;
        case RuleForm::Recursive: {
            if (head_productive) {
                violate(report, r, "3", "recursive union step for the productive predicate " + r.head);
                break;
            }
            const auto& other = s.calls[0].name == r.head ? s.calls[1] : s.calls[0];
            if (!report.productive.count(other.name)) {
                violate(report, r, "3", "union step calls the unproductive predicate " + other.name);
            }
            break;
        }
        case RuleForm::Union:
            if (head_productive) {
                violate(report, r, "4", "union rule for the productive predicate " + r.head);
                break;
            }
            for (const auto& c : s.calls) {
                if (!report.productive.count(c.name)) {
                    violate(report, r, "4", "union rule calls the unproductive predicate " + c.name);
                    break;
                }
            }
            break;
        }
    }
    return report;
}

RegularityReport require_regular(const Sid& sid)
{
    auto report = check_regular(sid);
    if (!report.regular) {
        const auto& v = report.violations.front();
        throw Error(ErrorKind::NotRegular, "rule " + v.rule_id + " violates condition " + v.condition + ": " +
                                               v.message);
    }
    return report;
}

} // namespace slrkit
