#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eplan/search.hpp"

namespace eplan::cli {

enum class Transition : std::uint8_t { Standard, Custom };

struct PlannerConfig {
    Representation representation = Representation::Kripke;
    Transition transition = Transition::Standard;
    Strategy strategy = Strategy::Bfs;
    std::uint32_t max_depth = 20;
    std::uint64_t max_nodes = 1000000;
    std::string dot_dir;       // empty = no DOT output
    std::uint64_t seed = 0;    // consumed by test generators only
    bool hbfs_prefer_deeper = false;
};

// Entry point behind the `eplan` binary. `args` excludes the program name.
//
//   solve    --domain D --problem P [config flags]   find and print a plan
//   validate --domain D --problem P --plan "a1 a2"   re-execute a plan
//   inspect  --domain D --problem P                  print the initial state
//
// Exit codes: 0 plan found / plan valid / inspected, 1 no plan within budget
// or invalid plan, 2 input error. Plans print one action per line (`<empty>`
// for the zero-length plan) followed by a key=value stats block. With --dot
// DIR, one depth_<k>_<digest>.dot file per depth level along the plan is
// written under DIR. The EPLAN_LOG environment variable (error|info|debug)
// controls diagnostics on stderr.
int run(const std::vector<std::string>& args);

}  // namespace eplan::cli
