#ifndef SLRKIT_ANALYSIS_HPP
#define SLRKIT_ANALYSIS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slrkit/canon.hpp"
#include "slrkit/graph.hpp"
#include "slrkit/slr.hpp"

namespace slrkit {

using Vec = std::vector<long>;

// Terminals are the productive rules, nonterminals the predicates.
struct Cfg {
    struct Symbol {
        bool terminal = false;
        std::size_t index = 0;
        friend bool operator==(const Symbol&, const Symbol&) = default;
    };
    struct Production {
        std::size_t lhs = 0;
        std::vector<Symbol> rhs;
        std::string rule;
    };
    std::vector<std::string> terminals;
    std::vector<std::string> nonterminals;
    std::vector<Production> productions;
    std::size_t start = 0;

    std::size_t terminal_index(const std::string& rule) const;
};

// One production per rule: Q -> r, Q -> r P1 .. Pk, P -> P Q, P -> Q1 .. Ql.
// Throws NotRegular.
Cfg sid_to_cfg(const Sid& sid, const std::string& start);

struct LinearSet {
    Vec base;
    std::vector<Vec> generators;
    bool contains(const Vec& v) const;
    friend bool operator==(const LinearSet&, const LinearSet&) = default;
};

struct SemilinearSet {
    std::size_t dimension = 0;
    std::vector<LinearSet> sets;
    bool contains(const Vec& v) const;
};

// Derivation skeletons with bounded nonterminal repetition plus basic pumps; linear sets
// contained in others are dropped. Throws EmptyLanguage.
SemilinearSet parikh_image(const Cfg& cfg);

// Throws UnknownRule when a rule is not productive.
bool is_pumping(const Sid& sid, const std::string& pred, const std::set<std::string>& rules);
bool is_pumping(const SemilinearSet& image, const Cfg& cfg, const std::set<std::string>& rules);

// col(x): labels a with a(x, .., x) among the atoms.
std::map<std::string, std::set<std::string>> coloring(const SlrFormula& psi);

struct RigidityViolation {
    std::string rule1;
    std::string rule2;
    std::string var1;
    std::string var2;
};

struct RigidityReport {
    bool rigid = true;
    std::vector<std::set<std::string>> pumping;
    std::vector<RigidityViolation> violations;
    std::map<std::string, std::map<std::string, std::set<std::string>>> colorings;
};

// Checks pumping singletons and pairs; all_subsets checks every subset of productive rules.
// Throws NotRegular and NotEqualityFree.
RigidityReport check_rigid(const Sid& sid, const std::string& pred, bool all_subsets = false);

// Number of existentials occurring in the relation and disequality atoms of a productive rule.
std::size_t rule_size(const Rule& rule);

// max |base| times max rule_size. Throws NotRigid.
long fusion_bound_B(const Sid& sid, const std::string& pred);

struct BoundsReport {
    long B = 0;
    long K = 0;
    long tw_bound = 0;
    long max_base = 0;
    long max_size = 0;
    SemilinearSet image;
    std::vector<std::string> coordinates;
    std::map<std::string, std::size_t> sizes;
};

// Eliminates equalities first. Throws NotRigid and NotRegular.
BoundsReport treewidth_bound(const Sid& sid, const std::string& pred);

// Largest simple-graph edge count on n vertices over the alphabet.
std::size_t max_simple_edges(const Alphabet& alphabet, std::size_t n);

// Models with at most max_vertices vertices in derivation order: for each parse tree the
// projected canonical model, then its proper fusions. Complete when every productive rule
// has a relation atom.
std::vector<CGraph> models_in_order(const Sid& sid, const std::string& pred, std::size_t max_vertices);

// Up to isomorphism.
GraphSet models_up_to(const Sid& sid, const std::string& pred, std::size_t max_vertices);

struct EntailmentResult {
    std::optional<CGraph> counterexample;
    std::size_t bound = 0;
};

// Checks each model of lhs against rhs with the given fuel, default_fuel when absent.
// Throws NotRegular and TooLarge.
EntailmentResult entails(const Sid& sid, const std::string& lhs, const std::string& rhs, std::size_t max_vertices,
                         std::optional<std::size_t> fuel = std::nullopt);

} // namespace slrkit

#endif
