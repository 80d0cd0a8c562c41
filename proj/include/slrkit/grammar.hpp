#ifndef SLRKIT_GRAMMAR_HPP
#define SLRKIT_GRAMMAR_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slrkit/canon.hpp"
#include "slrkit/graph.hpp"
#include "slrkit/slr.hpp"
#include "slrkit/slr_semantics.hpp"

namespace slrkit {

struct ParseEdge;

// Root of a parse tree for `pred`: one edge for a productive predicate, any number otherwise.
// Edges are kept sorted by serialization, so equal trees are equal values.
struct ParseVertex {
    std::string pred;
    std::vector<ParseEdge> edges;
    friend bool operator==(const ParseVertex&, const ParseVertex&) = default;
};

// Labelled by a productive rule; children follow the rule's predicate atoms.
struct ParseEdge {
    std::string rule;
    std::vector<ParseVertex> children;
    friend bool operator==(const ParseEdge&, const ParseEdge&) = default;
};

using ParseTree = ParseVertex;

std::string serialize(const ParseTree& t);
std::size_t productive_edges(const ParseTree& t);
// Occurrences of each rule id.
std::map<std::string, std::size_t> rule_counts(const ParseTree& t);
// Sorts edges at every vertex.
ParseTree normalize_order(ParseTree t);
std::string parse_tree_to_json(const ParseTree& t);

// Every parse tree of `pred` with at most max_edges productive edges, ordered by size, then
// serialization. Throws NotRegular.
std::vector<ParseTree> enumerate_parse_trees(const Sid& sid, const std::string& pred, std::size_t max_edges);

// Checks the structural conditions of parse trees against the SID.
bool is_parse_tree(const Sid& sid, const ParseTree& t);

// Annotated variables are named "<var>@e<n>" with edges numbered in depth-first order from 1.
// Free variables of a tree for a predicate of arity n are x1 .. xn.
struct CharFormula {
    SlrFormula formula;
    std::vector<std::string> free;
};

CharFormula char_formula(const Sid& sid, const ParseTree& t);

struct RichCanonicalModel {
    // Over the alphabet plus the disequality label.
    CGraph graph;
    ParseTree tree;
    Store store;
};

// Absent when the characteristic formula is unsatisfiable.
std::optional<RichCanonicalModel> rich_canonical_model(const Sid& sid, const ParseTree& t);

struct CanonicalModels {
    GraphSet rich;
    GraphSet projected;
};

// Throws NotRegular and NotEqualityFree.
CanonicalModels canonical_models(const Sid& sid, const std::string& pred, std::size_t max_edges);

// Hyperedge replacement grammars.

struct HrRule {
    std::string id;
    std::string head;
    bool productive = true;
    // Productive rules: a graph of type ar(head) over terminals and nonterminals, with the
    // nonterminal edges listed in order.
    CGraph graph;
    std::vector<std::string> nonterminal_edges;
    // Unproductive rules: the parallel composition of these nonterminals.
    std::vector<std::string> parts;
};

struct HrGrammar {
    std::map<std::string, std::size_t> nonterminals;
    std::vector<HrRule> rules;
    const HrRule* find_rule(const std::string& id) const;
};

struct GrammarTranslation {
    HrGrammar grammar;
    // SID rule id to grammar rule id; a bijection.
    std::map<std::string, std::string> gamma;
};

// Throws NotRegular and NotEqualityFree.
GrammarTranslation sid_to_grammar(const Sid& sid);

// Relabels a SID parse tree into the grammar.
ParseTree translate_tree(const GrammarTranslation& t, const ParseTree& tree);

struct DerivationTree {
    std::string nonterminal;
    std::string rule;
    // One child per nonterminal edge, or per part of an unproductive rule.
    std::vector<DerivationTree> children;
};

// Removes unproductive steps, attaching their subtrees to the parent vertex.
ParseTree derivation_normalize(const HrGrammar& g, const DerivationTree& d);

// A derivation tree normalizing to the given parse tree. Throws InvalidGraph if none exists.
DerivationTree derivation_of(const HrGrammar& g, const ParseTree& t);

// Graph of type ar(root) obtained by substitution and parallel composition.
CGraph eval_parse_tree(const HrGrammar& g, const ParseTree& t);

} // namespace slrkit

#endif
