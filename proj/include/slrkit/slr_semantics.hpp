#ifndef SLRKIT_SLR_SEMANTICS_HPP
#define SLRKIT_SLR_SEMANTICS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "slrkit/canon.hpp"
#include "slrkit/graph.hpp"
#include "slrkit/slr.hpp"

namespace slrkit {

// Variables to vertex indices of the target graph.
using Store = std::map<std::string, std::size_t>;

// For a quantifier- and predicate-free formula: a model together with a canonical store.
// Vertices are the equality classes occurring in relation atoms; the store is defined on
// the variables of those classes.
std::optional<std::pair<CGraph, Store>> sat_qpf(const SlrFormula& phi);

enum class Verdict { True, FalseAtFuel };

// 2 * (vertices + edges) + number of rules.
std::size_t default_fuel(const CGraph& g, const Sid& sid);

// Fuel counts predicate unfoldings. Graphs that are not simple or have isolated vertices
// are never models. Throws TooLarge above 64 edges.
Verdict slr_models(const CGraph& g, const Store& s, const SlrFormula& phi, const Sid& sid,
                   std::optional<std::size_t> fuel = std::nullopt);

// Least number of unfoldings proving the judgement, if any.
std::optional<std::size_t> slr_unfoldings(const CGraph& g, const Store& s, const SlrFormula& phi, const Sid& sid);

// All models of the nullary predicate with at most max_vertices vertices, up to isomorphism,
// computed as a least fixed point over a fixed vertex universe.
// Throws TooLarge when the universe admits more than 64 distinct edges.
GraphSet enumerate_models_bruteforce(const Sid& sid, const std::string& pred, std::size_t max_vertices);

} // namespace slrkit

#endif
