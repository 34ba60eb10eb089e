#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eplan/kripke.hpp"
#include "eplan/possibility.hpp"

namespace eplan {

using EventId = std::uint32_t;

// ── Update models ───────────────────────────────────────────────────────────
//
// A pointed event model: events with a precondition each, optional
// conditional fluent assignments (fluents not mentioned persist), and one
// event relation per agent. Applying one to an e-state is the product
// update below.

struct UpdateModel {
    std::string name;
    std::size_t num_events = 0;
    std::vector<FormulaId> pre;  // per event
    // Per event: (fluent, formula) pairs sorted by fluent; the fluent's new
    // value is the formula's truth value at the pre-update world.
    std::vector<std::vector<std::pair<FluentId, FormulaId>>> post;
    std::vector<std::vector<std::pair<EventId, EventId>>> relations;  // [agent], sorted
    EventId designated = 0;
};

// One event with trivial precondition, no effects, and identity relations:
// applying it leaves any state bisimilar to itself.
UpdateModel make_skip_model(std::size_t num_agents, FormulaStore& store);

// ── Classical action types ──────────────────────────────────────────────────

enum class ObsGroup : std::uint8_t { Fully, Partially, Oblivious };

// How one agent relates to an action occurrence. A guard, when present, is
// evaluated at the pre-update state; if it fails the agent drops to
// Oblivious for this occurrence.
struct ObsEntry {
    ObsGroup group = ObsGroup::Oblivious;
    std::optional<FormulaId> guard;
};

// Classification of every declared agent for one action instance.
struct ObservabilityMap {
    std::vector<ObsEntry> per_agent;  // indexed by AgentId, one entry each
};

enum class ActionKind : std::uint8_t { Ontic, Sensing, Announcement };

struct OnticAssignment {
    FluentId fluent = 0;
    bool value = true;
    std::optional<FormulaId> condition;
};

// A ground action of one of the three classical types. Ontic actions change
// fluents, sensing reveals one fluent's value, announcements communicate a
// formula. Ontic actions admit only fully observant and oblivious agents.
struct ActionSpec {
    std::string name;
    ActionKind kind = ActionKind::Ontic;
    FormulaId executability = kNoFormula;
    std::vector<OnticAssignment> assignments;  // Ontic
    FluentId sensed = 0;                       // Sensing
    FormulaId announced = kNoFormula;          // Announcement
    ObservabilityMap observability;
};

// ── Operations ──────────────────────────────────────────────────────────────

struct ApplyStats {
    std::size_t product_worlds = 0;     // before contraction
    std::size_t contracted_worlds = 0;  // after
};

// Product update. New worlds are pairs (w, e) with w satisfying pre(e); a
// pair's valuation applies e's assignments on top of w's; (w,e) ~i (w',e')
// iff w ~i w' and e ~i e'. The designated pair is (designated world,
// designated event); its precondition must hold or NotExecutableError is
// thrown. The result is bisim-contracted.
PointedKripke apply_update(const PointedKripke& state, const UpdateModel& u,
                           const FormulaStore& store, ApplyStats* stats = nullptr);

// Same product executed on the possibility graph; the result is interned in
// `pstore` and is bisimilar to the Kripke-path result.
Possibility apply_update(Possibility p, const UpdateModel& u, const FormulaStore& store,
                         PossibilityStore& pstore, ApplyStats* stats = nullptr);

// Compiles a classical action into an update model, resolving observability
// guards and (for sensing) the designated outcome against the given state:
//
//   ontic        events {effect, skip}; fully observant agents track the
//                effect event, oblivious agents see the skip event.
//   sensing f    events {f-true, f-false, skip}; fully observant agents
//                learn the outcome, partially observant agents learn only
//                that the sensing happened, oblivious agents see skip. The
//                designated event matches f's value at the state.
//   announce φ   sensing shape with φ in place of the fluent; the designated
//                event is the "φ holds" one (truthful announcements: the
//                φ-true precondition gates execution).
UpdateModel compile_action(const ActionSpec& a, const PointedKripke& state, FormulaStore& store);
UpdateModel compile_action(const ActionSpec& a, Possibility state, FormulaStore& store);

bool is_executable(const PointedKripke& state, const ActionSpec& a, const FormulaStore& store);
bool is_executable(Possibility state, const ActionSpec& a, const FormulaStore& store);

}  // namespace eplan
