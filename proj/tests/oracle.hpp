#pragma once

// Independent reference implementations the tests check the library against.
// They deliberately avoid the library's algorithms: entailment iterates the
// everyone-believes operator for common belief instead of computing
// reachability, and the bisimulation oracle runs a quadratic fixpoint over
// world pairs instead of partition refinement.

#include <optional>
#include <vector>

#include "eplan/epddl.hpp"
#include "eplan/formula.hpp"
#include "eplan/kripke.hpp"

namespace eplan::test {

// Literal recursive evaluator. Common belief of a group holds at w iff every
// iterate E^k (k = 0..|worlds|) holds at w, where E^0 is the body itself and
// E^{k+1} wraps the previous iterate in the everyone operator. Builds the
// iterates in the store, hence the non-const reference.
bool oracle_entails(const PointedKripke& state, FormulaStore& store, FormulaId f);

// Maximal bisimulation as a symmetric boolean matrix over all worlds,
// computed by fixpoint refinement of "same valuation".
std::vector<std::vector<bool>> naive_bisimulation(const KripkeStructure& m);

// Number of bisimulation classes among worlds reachable from `start`.
std::size_t naive_minimal_size(const KripkeStructure& m, WorldId start);

// For a structure whose worlds are pairwise non-bisimilar: one formula per
// world that is true exactly at that world (within this structure). Built by
// iterating modal refinements of the valuation description.
std::vector<FormulaId> characteristic_formulas(const KripkeStructure& m, FormulaStore& store);

// Exhaustive enumeration of action sequences (no duplicate pruning) up to
// the given depth; returns the length of the shortest goal-reaching
// sequence.
std::optional<std::size_t> brute_force_min_plan(epddl::PlanningTask& task, std::size_t max_depth);

}  // namespace eplan::test
