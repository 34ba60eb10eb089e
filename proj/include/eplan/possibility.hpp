#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "eplan/kripke.hpp"

namespace eplan {

// ── Possibilities ───────────────────────────────────────────────────────────
//
// The alternate e-state representation: a rooted graph whose nodes carry a
// valuation and per-agent successor sets, with cycles permitted. Equality of
// possibilities is bisimilarity, which a finite program realizes as maximal
// sharing: every node is interned by the canonical digest of the subgraph it
// roots, so two nodes in one store are bisimilar iff they are the same
// object. Node pointers stay valid for the lifetime of their store. The
// store is single-writer during construction; interned nodes are immutable
// and safe to read concurrently.

struct PossNode {
    std::vector<bool> valuation;
    std::vector<std::vector<const PossNode*>> successors;  // [agent], sorted by digest
    Digest digest;
};

using Possibility = const PossNode*;

class PossibilityStore {
public:
    PossibilityStore(std::size_t num_agents, std::size_t num_fluents);

    // Translates a pointed structure: one node per reachable world of the
    // bisimulation quotient, root = designated world. The result is bisimilar
    // to the input and maximally shared with everything already interned.
    Possibility from_kripke(const PointedKripke& state);

    std::size_t num_agents() const noexcept { return num_agents_; }
    std::size_t num_fluents() const noexcept { return num_fluents_; }
    std::size_t size() const noexcept { return nodes_.size(); }

private:
    std::size_t num_agents_;
    std::size_t num_fluents_;
    std::unordered_map<Digest, std::unique_ptr<PossNode>, DigestHash> nodes_;
};

// Inverse embedding: nodes become worlds, the root becomes the designated
// world. to_kripke(from_kripke(s)) is bisimilar to s.
PointedKripke to_kripke(Possibility p);

// Number of nodes reachable from the root.
std::size_t num_nodes(Possibility p);

// Direct evaluator on the node graph; agrees with entails(to_kripke(p), f).
bool entails_p(Possibility p, const FormulaStore& store, FormulaId f);

// Textual dump mirroring the Kripke one (nodes numbered in traversal order).
std::string dump(Possibility p, const Vocabulary& vocab);

}  // namespace eplan
