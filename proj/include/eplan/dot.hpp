#pragma once

#include <string>

#include "eplan/kripke.hpp"
#include "eplan/vocabulary.hpp"

namespace eplan {

// Graphviz rendering of an e-state: worlds as nodes labeled with their true
// fluents (sorted), the designated world double-circled, one edge per
// (agent, source, target) labeled with the agent. The state is canonicalized
// first, so bisimilar inputs serialize to identical bytes.
std::string emit_dot(const PointedKripke& state, const Vocabulary& vocab);

}  // namespace eplan
