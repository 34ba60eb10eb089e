#include "eplan/possibility.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "eplan/errors.hpp"

namespace eplan {

PossibilityStore::PossibilityStore(std::size_t num_agents, std::size_t num_fluents)
    : num_agents_(num_agents), num_fluents_(num_fluents) {}

Possibility PossibilityStore::from_kripke(const PointedKripke& state) {
    if (state.structure->num_agents() != num_agents_ ||
        state.structure->num_fluents() != num_fluents_)
        throw EplanError("state signature does not match the possibility store");

    PointedKripke q = bisim_contract(state);
    const KripkeStructure& m = *q.structure;
    std::size_t n = m.num_worlds();

    // Every world of the quotient identifies a distinct possibility; its
    // digest is the canonical digest of the structure pointed at that world.
    std::vector<Digest> digest(n);
    for (WorldId w = 0; w < n; ++w) digest[w] = canonical_digest(PointedKripke{q.structure, w});

    std::vector<PossNode*> node(n, nullptr);
    std::vector<bool> fresh(n, false);
    for (WorldId w = 0; w < n; ++w) {
        auto it = nodes_.find(digest[w]);
        if (it != nodes_.end()) {
            node[w] = it->second.get();
            continue;
        }
        auto owned = std::make_unique<PossNode>();
        owned->valuation = m.valuation(w);
        owned->successors.resize(num_agents_);
        owned->digest = digest[w];
        node[w] = owned.get();
        fresh[w] = true;
        nodes_.emplace(digest[w], std::move(owned));
    }

    // Wire only the nodes created here; reused nodes already point at the
    // interned instances for the same digests.
    for (WorldId w = 0; w < n; ++w) {
        if (!fresh[w]) continue;
        for (AgentId a = 0; a < num_agents_; ++a) {
            auto& out = node[w]->successors[a];
            for (WorldId t : m.successors(a, w)) out.push_back(node[t]);
            std::sort(out.begin(), out.end(), [](const PossNode* x, const PossNode* y) {
                return x->digest < y->digest;
            });
        }
    }

    return node[q.designated];
}

// ── Conversions and evaluation ──────────────────────────────────────────────

namespace {

// Nodes reachable from the root in BFS order (successors in stored order).
std::vector<const PossNode*> collect_nodes(Possibility root) {
    std::vector<const PossNode*> order;
    std::unordered_map<const PossNode*, bool> seen;
    std::deque<const PossNode*> queue{root};
    seen[root] = true;
    while (!queue.empty()) {
        const PossNode* cur = queue.front();
        queue.pop_front();
        order.push_back(cur);
        for (const auto& succ : cur->successors) {
            for (const PossNode* t : succ) {
                if (!seen[t]) {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }
    return order;
}

}  // namespace

PointedKripke to_kripke(Possibility p) {
    std::vector<const PossNode*> order = collect_nodes(p);
    std::unordered_map<const PossNode*, WorldId> index;
    for (WorldId i = 0; i < order.size(); ++i) index[order[i]] = i;

    KripkeStructure m(p->successors.size(), p->valuation.size());
    for (const PossNode* node : order) m.add_world(node->valuation);
    for (WorldId w = 0; w < order.size(); ++w) {
        for (AgentId a = 0; a < order[w]->successors.size(); ++a) {
            std::vector<WorldId> targets;
            targets.reserve(order[w]->successors[a].size());
            for (const PossNode* t : order[w]->successors[a]) targets.push_back(index[t]);
            std::sort(targets.begin(), targets.end());
            m.set_successors(a, w, std::move(targets));
        }
    }
    return make_pointed(std::move(m), 0);
}

namespace {

struct PossKeyHash {
    std::size_t operator()(const std::pair<const PossNode*, FormulaId>& k) const noexcept {
        return std::hash<const void*>()(k.first) ^ (static_cast<std::size_t>(k.second) * 0x9e3779b97f4a7c15ULL);
    }
};

class PossEvaluator {
public:
    explicit PossEvaluator(const FormulaStore& store) : store_(store) {}

    bool holds(const PossNode* p, FormulaId f) {
        auto key = std::make_pair(p, f);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;

        const FormulaNode& n = store_.node(f);
        bool result = false;
        switch (n.kind) {
            case FormulaKind::True:
                result = true;
                break;
            case FormulaKind::False:
                result = false;
                break;
            case FormulaKind::Atom:
                result = p->valuation[n.fluent];
                break;
            case FormulaKind::Not:
                result = !holds(p, n.lhs);
                break;
            case FormulaKind::And:
                result = holds(p, n.lhs) && holds(p, n.rhs);
                break;
            case FormulaKind::Or:
                result = holds(p, n.lhs) || holds(p, n.rhs);
                break;
            case FormulaKind::Implies:
                result = !holds(p, n.lhs) || holds(p, n.rhs);
                break;
            case FormulaKind::Believes: {
                result = true;
                for (const PossNode* t : p->successors[n.agent]) {
                    if (!holds(t, n.lhs)) {
                        result = false;
                        break;
                    }
                }
                break;
            }
            case FormulaKind::Everyone: {
                result = true;
                for (AgentId i : n.group) {
                    for (const PossNode* t : p->successors[i]) {
                        if (!holds(t, n.lhs)) {
                            result = false;
                            break;
                        }
                    }
                    if (!result) break;
                }
                break;
            }
            case FormulaKind::Common: {
                result = true;
                std::unordered_map<const PossNode*, bool> seen;
                std::deque<const PossNode*> queue{p};
                seen[p] = true;
                while (!queue.empty() && result) {
                    const PossNode* cur = queue.front();
                    queue.pop_front();
                    if (!holds(cur, n.lhs)) {
                        result = false;
                        break;
                    }
                    for (AgentId i : n.group) {
                        for (const PossNode* t : cur->successors[i]) {
                            if (!seen[t]) {
                                seen[t] = true;
                                queue.push_back(t);
                            }
                        }
                    }
                }
                break;
            }
        }
        memo_.emplace(key, result);
        return result;
    }

private:
    const FormulaStore& store_;
    std::unordered_map<std::pair<const PossNode*, FormulaId>, bool, PossKeyHash> memo_;
};

}  // namespace

std::size_t num_nodes(Possibility p) { return collect_nodes(p).size(); }

bool entails_p(Possibility p, const FormulaStore& store, FormulaId f) {
    check_signature(store, f, p->valuation.size(), p->successors.size());
    PossEvaluator ev(store);
    return ev.holds(p, f);
}

std::string dump(Possibility p, const Vocabulary& vocab) {
    return dump(to_kripke(p), vocab);
}

}  // namespace eplan
