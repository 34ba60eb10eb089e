#include "eplan/search.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <queue>
#include <tuple>
#include <unordered_set>

#include "eplan/errors.hpp"
#include "eplan/update.hpp"

namespace eplan {

namespace {

// Compiles a classical action against the state (resolving guards and the
// sensing outcome); custom models pass through unchanged.
template <typename State>
UpdateModel prepare_model(const epddl::GroundAction& ga, const State& state,
                          epddl::PlanningTask& task) {
    if (ga.is_classical())
        return compile_action(std::get<ActionSpec>(ga.op), state, task.store);
    return std::get<UpdateModel>(ga.op);
}

}  // namespace

std::vector<std::pair<std::size_t, PointedKripke>> successors(const PointedKripke& state,
                                                              epddl::PlanningTask& task) {
    std::vector<std::pair<std::size_t, PointedKripke>> out;
    for (std::size_t i = 0; i < task.actions.size(); ++i) {
        UpdateModel model = prepare_model(task.actions[i], state, task);
        if (!entails(state, task.store, model.pre[model.designated])) continue;
        out.push_back({i, apply_update(state, model, task.store)});
    }
    return out;
}

std::vector<std::pair<std::size_t, Possibility>> successors(Possibility state,
                                                            epddl::PlanningTask& task,
                                                            PossibilityStore& pstore) {
    std::vector<std::pair<std::size_t, Possibility>> out;
    for (std::size_t i = 0; i < task.actions.size(); ++i) {
        UpdateModel model = prepare_model(task.actions[i], state, task);
        if (!entails_p(state, task.store, model.pre[model.designated])) continue;
        out.push_back({i, apply_update(state, model, task.store, pstore)});
    }
    return out;
}

namespace {

struct KripkeRep {
    epddl::PlanningTask& task;
    using State = PointedKripke;

    State initial() const { return bisim_contract(epddl::build_initial_state(task)); }
    Digest digest(const State& s) const { return canonical_digest(s); }
    bool entails_goal(const State& s) const { return entails(s, task.store, task.goal); }
    bool entails_formula(const State& s, FormulaId f) const { return entails(s, task.store, f); }
    std::vector<std::pair<std::size_t, State>> expand(const State& s) const {
        return successors(s, task);
    }
};

struct PossibilityRep {
    epddl::PlanningTask& task;
    PossibilityStore& pstore;
    using State = Possibility;

    State initial() const { return pstore.from_kripke(epddl::build_initial_state(task)); }
    Digest digest(const State& s) const { return s->digest; }
    bool entails_goal(const State& s) const { return entails_p(s, task.store, task.goal); }
    bool entails_formula(const State& s, FormulaId f) const {
        return entails_p(s, task.store, f);
    }
    std::vector<std::pair<std::size_t, State>> expand(const State& s) const {
        return successors(s, task, pstore);
    }
};

template <typename Rep>
SearchResult search_impl(Rep rep, epddl::PlanningTask& task, const SearchConfig& config) {
    using State = typename Rep::State;
    using Clock = std::chrono::steady_clock;

    struct Node {
        State state;
        std::size_t parent;
        std::size_t action;
        std::uint32_t depth;
    };

    const auto start = Clock::now();
    SearchResult result;
    SearchStats& stats = result.stats;

    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
    auto finish = [&](Termination t) {
        stats.wall_seconds = elapsed();
        result.termination = t;
        return result;
    };

    std::vector<FormulaId> conjuncts = top_level_conjuncts(task.store, task.goal);
    auto heuristic = [&](const State& s) {
        int h = 0;
        for (FormulaId c : conjuncts)
            if (!rep.entails_formula(s, c)) ++h;
        return h;
    };

    std::vector<Node> arena;
    std::unordered_set<Digest, DigestHash> visited;

    auto extract_plan = [&](std::size_t idx) {
        Plan plan;
        while (arena[idx].parent != SIZE_MAX) {
            plan.actions.push_back(task.actions[arena[idx].action].name);
            idx = arena[idx].parent;
        }
        std::reverse(plan.actions.begin(), plan.actions.end());
        return plan;
    };

    {
        State init = rep.initial();
        stats.generated = 1;
        if (config.prune_duplicates) visited.insert(rep.digest(init));
        bool goal = rep.entails_goal(init);
        arena.push_back(Node{std::move(init), SIZE_MAX, SIZE_MAX, 0});
        if (goal) {
            result.plan = Plan{};
            return finish(Termination::GoalFound);
        }
    }

    const bool use_heap = config.strategy == Strategy::Hbfs;
    std::deque<std::size_t> fifo;
    using HeapItem = std::tuple<int, std::int64_t, std::size_t>;  // h, depth key, arena index
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> heap;

    auto push = [&](std::size_t idx) {
        if (use_heap) {
            std::int64_t depth_key = arena[idx].depth;
            if (config.hbfs_prefer_deeper) depth_key = -depth_key;
            heap.push({heuristic(arena[idx].state), depth_key, idx});
        } else {
            fifo.push_back(idx);
        }
    };
    push(0);

    while (use_heap ? !heap.empty() : !fifo.empty()) {
        std::size_t idx;
        if (use_heap) {
            idx = std::get<2>(heap.top());
            heap.pop();
        } else {
            idx = fifo.front();
            fifo.pop_front();
        }

        // Copy out before the arena reallocates under new children.
        State current = arena[idx].state;
        std::uint32_t depth = arena[idx].depth;

        if (depth >= config.max_depth) continue;  // children would overshoot
        if (config.max_seconds > 0 && elapsed() > config.max_seconds)
            return finish(Termination::BudgetExceeded);
        ++stats.expanded;

        for (auto& [action_idx, succ] : rep.expand(current)) {
            if (stats.generated >= config.max_nodes) return finish(Termination::BudgetExceeded);
            ++stats.generated;
            Digest d = rep.digest(succ);
            if (config.prune_duplicates) {
                if (!visited.insert(d).second) {
                    ++stats.duplicates;
                    continue;
                }
            }
            arena.push_back(Node{std::move(succ), idx, action_idx, depth + 1});
            stats.max_depth_reached = std::max(stats.max_depth_reached, depth + 1);
            if (rep.entails_goal(arena.back().state)) {
                result.plan = extract_plan(arena.size() - 1);
                return finish(Termination::GoalFound);
            }
            push(arena.size() - 1);
        }
    }
    return finish(Termination::Exhausted);
}

}  // namespace

SearchResult search(epddl::PlanningTask& task, const SearchConfig& config) {
    if (config.representation == Representation::Possibility) {
        PossibilityStore pstore(task.vocab.num_agents(), task.vocab.num_fluents());
        return search_impl(PossibilityRep{task, pstore}, task, config);
    }
    return search_impl(KripkeRep{task}, task, config);
}

// ── Plan validation ─────────────────────────────────────────────────────────

std::vector<std::string> ValidationResult::trace() const {
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < steps.size(); ++i)
        lines.push_back("step " + std::to_string(i + 1) + ": " + steps[i].action +
                        (steps[i].executable ? " executable" : " NOT executable"));
    if (failed_step < 0)
        lines.push_back(goal_entailed ? "goal entailed" : "goal NOT entailed");
    return lines;
}

ValidationResult validate_plan(epddl::PlanningTask& task, const std::vector<std::string>& plan) {
    std::vector<std::size_t> indices;
    indices.reserve(plan.size());
    for (const std::string& name : plan) {
        std::string key = to_lower(name);
        auto it = std::find_if(task.actions.begin(), task.actions.end(),
                               [&](const epddl::GroundAction& ga) { return ga.name == key; });
        if (it == task.actions.end())
            throw EplanError("plan names unknown action '" + name + "'");
        indices.push_back(static_cast<std::size_t>(it - task.actions.begin()));
    }

    ValidationResult result;
    PointedKripke state = bisim_contract(epddl::build_initial_state(task));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const epddl::GroundAction& ga = task.actions[indices[i]];
        UpdateModel model = prepare_model(ga, state, task);
        bool executable = entails(state, task.store, model.pre[model.designated]);
        result.steps.push_back(ValidationStep{ga.name, executable});
        if (!executable) {
            result.failed_step = static_cast<int>(i + 1);
            result.message = "step " + std::to_string(i + 1) + " (" + ga.name +
                             ") is not executable";
            return result;
        }
        state = apply_update(state, model, task.store);
    }
    result.goal_entailed = entails(state, task.store, task.goal);
    result.valid = result.goal_entailed;
    if (!result.valid) result.message = "the final state does not entail the goal";
    return result;
}

}  // namespace eplan
