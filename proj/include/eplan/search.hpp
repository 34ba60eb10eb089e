#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eplan/epddl.hpp"
#include "eplan/kripke.hpp"
#include "eplan/possibility.hpp"

namespace eplan {

enum class Strategy : std::uint8_t { Bfs, Hbfs };
enum class Representation : std::uint8_t { Kripke, Possibility };

struct SearchConfig {
    Strategy strategy = Strategy::Bfs;
    Representation representation = Representation::Kripke;
    std::uint32_t max_depth = 20;
    std::uint64_t max_nodes = 1000000;  // generated-node budget
    double max_seconds = 0;             // 0 = unlimited
    bool prune_duplicates = true;       // visited set keyed by canonical digest
    bool hbfs_prefer_deeper = false;    // tie-break toward deeper nodes
};

struct SearchStats {
    std::uint64_t expanded = 0;
    std::uint64_t generated = 0;
    std::uint64_t duplicates = 0;
    std::uint32_t max_depth_reached = 0;
    double wall_seconds = 0;
};

struct Plan {
    std::vector<std::string> actions;  // ground action names, in order
};

enum class Termination : std::uint8_t { GoalFound, Exhausted, BudgetExceeded };

struct SearchResult {
    std::optional<Plan> plan;
    SearchStats stats;
    Termination termination = Termination::Exhausted;
};

// Successor states of one e-state: one entry per executable ground action
// (classical actions are compiled against the state first), each the
// contracted result of the product update, in grounding order. Interning new
// formulas during compilation grows the task's store, hence the non-const
// task. Inexecutable actions are skipped.
std::vector<std::pair<std::size_t, PointedKripke>> successors(const PointedKripke& state,
                                                              epddl::PlanningTask& task);
std::vector<std::pair<std::size_t, Possibility>> successors(Possibility state,
                                                            epddl::PlanningTask& task,
                                                            PossibilityStore& pstore);

// Forward search from the initial state. Bfs returns a shortest plan (by
// action count) reaching a goal-entailing state within max_depth; Hbfs
// orders the frontier by the number of top-level goal conjuncts not yet
// entailed (ties by lower depth, then insertion order) and returns a valid
// but not necessarily shortest plan. Duplicate states are pruned by
// canonical digest.
SearchResult search(epddl::PlanningTask& task, const SearchConfig& config);

struct ValidationStep {
    std::string action;
    bool executable = false;
};

struct ValidationResult {
    bool valid = false;
    std::vector<ValidationStep> steps;
    bool goal_entailed = false;
    int failed_step = -1;  // 1-based step that failed, -1 if none
    std::string message;

    // One line per step plus the goal check, ready for printing.
    std::vector<std::string> trace() const;
};

// Re-executes a plan: every step must be executable in sequence and the
// final state must entail the goal. Unknown action names throw EplanError.
ValidationResult validate_plan(epddl::PlanningTask& task, const std::vector<std::string>& plan);

}  // namespace eplan
