#ifndef SLRKIT_SLR_HPP
#define SLRKIT_SLR_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slrkit/graph.hpp"

namespace slrkit {

struct SlrFormula {
    enum class Kind { Emp, Eq, Neq, Rel, Pred, Sep, Exists };

    Kind kind = Kind::Emp;
    // Relation or predicate name for Rel/Pred; bound variable for Exists.
    std::string name;
    std::vector<std::string> args;
    // Sep: two or more operands; Exists: exactly one body.
    std::vector<SlrFormula> children;

    static SlrFormula emp();
    static SlrFormula eq(std::string x, std::string y);
    static SlrFormula neq(std::string x, std::string y);
    static SlrFormula rel(std::string label, std::vector<std::string> args);
    static SlrFormula pred(std::string name, std::vector<std::string> args);
    // Flattens nested separating conjunctions; a single operand is returned as is, none gives emp.
    static SlrFormula sep(std::vector<SlrFormula> parts);
    static SlrFormula exists(std::string var, SlrFormula body);
    static SlrFormula exists(const std::vector<std::string>& vars, SlrFormula body);

    friend bool operator==(const SlrFormula&, const SlrFormula&) = default;
};

std::set<std::string> free_vars(const SlrFormula& f);
bool is_qpf(const SlrFormula& f);
bool is_predicate_free(const SlrFormula& f);
// Capture-avoiding renaming of free variables.
SlrFormula rename_free(const SlrFormula& f, const std::map<std::string, std::string>& renaming);
std::string to_string(const SlrFormula& f);

// Top-level operands of a separating conjunction (a single operand for any other formula).
std::vector<SlrFormula> sep_operands(const SlrFormula& f);

// exists x1 .. xm . (a1 * .. * ak) with no quantifier among the ai.
struct PrenexBody {
    std::vector<std::string> exists;
    std::vector<SlrFormula> atoms;
};
// Absent when a quantifier occurs below a separating conjunction.
std::optional<PrenexBody> prenex_body(const SlrFormula& f);

struct Rule {
    std::string head;
    std::vector<std::string> params;
    SlrFormula body;
    // "<head>.<index among the rules of head>".
    std::string id;
};

struct Sid {
    Alphabet alphabet;
    std::map<std::string, std::size_t> predicates;
    std::vector<Rule> rules;

    std::size_t arity(const std::string& pred) const;
    std::vector<const Rule*> rules_of(const std::string& pred) const;
    const Rule* find_rule(std::string_view id) const;
};

// Assigns rule ids in order of appearance and validates names, arities and scoping.
void finalize_sid(Sid& sid);

Sid parse_sid(std::string_view text);
Sid read_sid_file(const std::string& path);
std::string print_sid(const Sid& sid);

// Parses a single formula; `vars` are the variables allowed to occur free.
SlrFormula parse_slr_formula(std::string_view text, const Sid& context,
                             const std::vector<std::string>& vars = {});

// No equality atoms and no predicate atom repeating a variable.
bool is_equality_free(const Sid& sid);

// Equivalent equality-free SID. A predicate P called with argument aliasing pattern p
// becomes P__i_j_.. where the indices number the blocks of p; the identity pattern keeps
// the name P.
Sid equality_eliminate(const Sid& sid);

} // namespace slrkit

#endif
