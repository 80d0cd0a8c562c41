#ifndef SLRKIT_REGULAR_HPP
#define SLRKIT_REGULAR_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "slrkit/slr.hpp"

namespace slrkit {

// Syntactic forms of regular rules: a single relation atom, an existentially quantified
// productive body, a recursive union step P <= P * Q, and a plain union P <= Q1 * .. * Ql.
enum class RuleForm { SingleAtom = 1, Productive = 2, Recursive = 3, Union = 4 };

struct RuleShape {
    RuleForm form = RuleForm::Productive;
    // False when a quantifier occurs below a separating conjunction.
    bool prenex = true;
    std::vector<std::string> exists;
    // Relation, equality and disequality atoms.
    std::vector<SlrFormula> qpf;
    std::vector<SlrFormula> calls;
};

RuleShape rule_shape(const Rule& rule);
bool is_productive_form(RuleForm form);

struct RegularityViolation {
    std::string rule_id;
    // "1", "2", "2a", "2b", "3" or "4".
    std::string condition;
    std::string message;
};

struct RegularityReport {
    bool regular = true;
    std::set<std::string> productive;
    std::set<std::string> unproductive;
    std::map<std::string, RuleForm> forms;
    std::vector<RegularityViolation> violations;
};

// A predicate is productive when its first rule with a nonempty body has a productive form.
// Connectivity requires consecutive relation atoms to share a variable.
RegularityReport check_regular(const Sid& sid);

// Throws NotRegular with the first violation.
RegularityReport require_regular(const Sid& sid);

} // namespace slrkit

#endif
