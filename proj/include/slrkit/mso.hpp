#ifndef SLRKIT_MSO_HPP
#define SLRKIT_MSO_HPP

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slrkit/canon.hpp"
#include "slrkit/graph.hpp"

namespace slrkit {

struct MsoFormula {
    enum class Kind {
        True,
        False,
        Eq,
        // edg_a(x1, ..., x_{ar+1}): x1 is an a-edge attached to x2, ...
        Edg,
        Member,
        // x is a vertex.
        IsVertex,
        // x is an a-edge whose position-th attachment is y.
        Incid,
        Not,
        And,
        Or,
        ExistsFO,
        ForallFO,
        ExistsSO,
        ForallSO,
    };

    Kind kind = Kind::True;
    // Label for Edg/Incid, set variable for Member, bound variable for quantifiers.
    std::string name;
    std::vector<std::string> args;
    std::size_t position = 0;
    std::vector<MsoFormula> children;

    static MsoFormula truth();
    static MsoFormula falsity();
    static MsoFormula eq(std::string x, std::string y);
    static MsoFormula edg(std::string label, std::vector<std::string> args);
    static MsoFormula member(std::string set, std::string x);
    static MsoFormula is_vertex(std::string x);
    static MsoFormula incid(std::string label, std::size_t position, std::string edge, std::string vertex);
    static MsoFormula negate(MsoFormula f);
    static MsoFormula conj(std::vector<MsoFormula> parts);
    static MsoFormula disj(std::vector<MsoFormula> parts);
    static MsoFormula implies(MsoFormula a, MsoFormula b);
    static MsoFormula iff(MsoFormula a, MsoFormula b);
    static MsoFormula exists(std::string x, MsoFormula body);
    static MsoFormula forall(std::string x, MsoFormula body);
    static MsoFormula exists_set(std::string x, MsoFormula body);
    static MsoFormula forall_set(std::string x, MsoFormula body);

    friend bool operator==(const MsoFormula&, const MsoFormula&) = default;
};

std::string to_string(const MsoFormula& f);

struct MsoFreeVars {
    std::set<std::string> first_order;
    std::set<std::string> second_order;
};
MsoFreeVars mso_free_vars(const MsoFormula& f);

// Parses macro definitions (let name(params) := body ;), free variable declarations
// (var x ; setvar X ;) and a final formula. Label atoms a(x1..xk) stand for
// exists e . edg_a(e, x1..xk); with an alphabet they must name one of its labels,
// without one their name must start with a lowercase letter.
MsoFormula parse_mso(std::string_view text, const std::optional<Alphabet>& alphabet = std::nullopt);
MsoFormula read_mso_file(const std::string& path, const std::optional<Alphabet>& alphabet = std::nullopt);

// Domain elements: vertices, then edges.
struct Element {
    bool edge = false;
    std::size_t index = 0;
    friend auto operator<=>(const Element&, const Element&) = default;
};

struct MsoStore {
    std::map<std::string, Element> first_order;
    std::map<std::string, std::set<Element>> second_order;
};

inline constexpr std::size_t kMsoSetDomainSoftLimit = 16;

// First-order quantifiers range over vertices and edges, second-order ones over finite sets of
// them. Throws TooLarge when a set quantifier would range over more than `set_limit` elements.
bool mso_eval(const CGraph& g, const MsoStore& s, const MsoFormula& phi,
              std::size_t set_limit = kMsoSetDomainSoftLimit);

struct TransductionScheme {
    Alphabet input;
    Alphabet output;
    std::size_t copies = 1;
    std::vector<std::string> parameters;
    MsoFormula domain;
    // Layer formulas, free first-order variable x1.
    std::vector<MsoFormula> layers;
    // Keyed by output label and 1-based layers (i1, ..., i_{ar+1}); free variables x1 .. x_{ar+1}.
    // Missing entries are false.
    std::map<std::pair<std::string, std::vector<std::size_t>>, MsoFormula> edges;
};

// Outputs for every parameter valuation satisfying the domain formula, up to isomorphism.
// Output ids are "<input id>/<layer>". Throws AlphabetMismatch and NonFunctionalScheme.
GraphSet apply_transduction(const TransductionScheme& theta, const CGraph& g,
                            std::size_t set_limit = kMsoSetDomainSoftLimit);

TransductionScheme identity_scheme(const Alphabet& alphabet);

// Two-copying scheme splitting one vertex; X1 holds the vertex and X<i>_<a> the a-edges whose
// i-th attachment moves to the first copy.
TransductionScheme fission_scheme(const Alphabet& alphabet);

} // namespace slrkit

#endif
