#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "eplan/digest.hpp"
#include "eplan/formula.hpp"
#include "eplan/vocabulary.hpp"

namespace eplan {

using WorldId = std::uint32_t;

// Finite Kripke structure: worlds with fluent valuations plus one binary
// accessibility relation per agent, stored as sorted adjacency lists.
// Mutable while being built, treated as immutable once wrapped in a
// PointedKripke (queries on a shared structure may run concurrently).
class KripkeStructure {
public:
    KripkeStructure(std::size_t num_agents, std::size_t num_fluents);

    WorldId add_world(std::vector<bool> valuation);

    // Keeps the adjacency list sorted and duplicate-free.
    void add_edge(AgentId agent, WorldId from, WorldId to);

    // Bulk variant for builders; `targets` must be sorted and unique.
    void set_successors(AgentId agent, WorldId from, std::vector<WorldId> targets);

    const std::vector<bool>& valuation(WorldId w) const { return valuations_[w]; }
    std::span<const WorldId> successors(AgentId agent, WorldId w) const;
    bool has_edge(AgentId agent, WorldId from, WorldId to) const;

    std::size_t num_worlds() const noexcept { return valuations_.size(); }
    std::size_t num_agents() const noexcept { return relations_.size(); }
    std::size_t num_fluents() const noexcept { return num_fluents_; }

private:
    std::size_t num_fluents_;
    std::vector<std::vector<bool>> valuations_;
    std::vector<std::vector<std::vector<WorldId>>> relations_;  // [agent][world]
};

// An e-state: structure plus the designated "real" world.
struct PointedKripke {
    std::shared_ptr<const KripkeStructure> structure;
    WorldId designated = 0;
};

PointedKripke make_pointed(KripkeStructure m, WorldId designated);

// ── Entailment ──────────────────────────────────────────────────────────────

// Memoized evaluator over one structure. holds(w, f) answers "does f hold at
// world w"; the memo is shared across worlds and formulas, which product
// update exploits when it evaluates the same preconditions at every world.
// Formula ids must lie within the structure's signature (the `entails`
// wrapper checks this).
class EntailmentSession {
public:
    EntailmentSession(const KripkeStructure& m, const FormulaStore& store);

    bool holds(WorldId w, FormulaId f);

private:
    const KripkeStructure& m_;
    const FormulaStore& store_;
    std::unordered_map<std::uint64_t, bool> memo_;
};

// Truth at the designated world. Group belief E quantifies over every agent
// in the group; common belief C holds iff the formula holds at every world
// reachable from the designated one via zero or more steps of any agent in
// the group (the zero-step case includes the designated world itself).
bool entails(const PointedKripke& state, const FormulaStore& store, FormulaId f);

// ── Frame classification ────────────────────────────────────────────────────

struct FrameClass {
    struct AgentFlags {
        bool reflexive = true;
        bool transitive = true;
        bool euclidean = true;
        bool serial = true;
    };

    enum class Label { S5, KD45, KOnly };

    std::vector<AgentFlags> agents;

    bool all_reflexive() const;
    bool all_transitive() const;
    bool all_euclidean() const;
    bool all_serial() const;

    // S5 when every agent's relation is reflexive+transitive+euclidean,
    // KD45 when serial+transitive+euclidean, otherwise plain K.
    Label label() const;
};

FrameClass classify_frame(const KripkeStructure& m);

// ── Canonicalization ────────────────────────────────────────────────────────

// Quotient under the coarsest bisimulation, restricted to worlds reachable
// from the designated one. Entails exactly the same formulae as the input;
// idempotent up to isomorphism.
PointedKripke bisim_contract(const PointedKripke& state);

// Canonical world order of a bisimulation-minimal structure: iterated rank
// refinement seeded by valuation bits, refined by outgoing and incoming
// (agent, rank) signatures; leftover ties fall back to the original index.
std::vector<WorldId> canonical_order(const KripkeStructure& m);

// Digest of the contracted, canonically ordered state. Bisimilar states get
// equal digests; distinct digests imply non-bisimilar states.
Digest canonical_digest(const PointedKripke& state);

// Deterministic textual dump used by golden tests: worlds with sorted
// valuations, then edges sorted by agent/source/target.
std::string dump(const PointedKripke& state, const Vocabulary& vocab);

}  // namespace eplan
