#include "eplan/kripke.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <sstream>

#include "eplan/errors.hpp"

namespace eplan {

KripkeStructure::KripkeStructure(std::size_t num_agents, std::size_t num_fluents)
    : num_fluents_(num_fluents), relations_(num_agents) {}

WorldId KripkeStructure::add_world(std::vector<bool> valuation) {
    if (valuation.size() != num_fluents_)
        throw EplanError("world valuation width mismatch");
    auto id = static_cast<WorldId>(valuations_.size());
    valuations_.push_back(std::move(valuation));
    for (auto& rel : relations_) rel.emplace_back();
    return id;
}

void KripkeStructure::add_edge(AgentId agent, WorldId from, WorldId to) {
    if (agent >= relations_.size() || from >= num_worlds() || to >= num_worlds())
        throw EplanError("edge endpoint outside structure");
    auto& targets = relations_[agent][from];
    auto it = std::lower_bound(targets.begin(), targets.end(), to);
    if (it == targets.end() || *it != to) targets.insert(it, to);
}

void KripkeStructure::set_successors(AgentId agent, WorldId from, std::vector<WorldId> targets) {
    relations_[agent][from] = std::move(targets);
}

std::span<const WorldId> KripkeStructure::successors(AgentId agent, WorldId w) const {
    return relations_[agent][w];
}

bool KripkeStructure::has_edge(AgentId agent, WorldId from, WorldId to) const {
    const auto& targets = relations_[agent][from];
    return std::binary_search(targets.begin(), targets.end(), to);
}

PointedKripke make_pointed(KripkeStructure m, WorldId designated) {
    if (designated >= m.num_worlds())
        throw EplanError("designated world outside structure");
    return PointedKripke{std::make_shared<const KripkeStructure>(std::move(m)), designated};
}

// ── Entailment ──────────────────────────────────────────────────────────────

EntailmentSession::EntailmentSession(const KripkeStructure& m, const FormulaStore& store)
    : m_(m), store_(store) {}

bool EntailmentSession::holds(WorldId w, FormulaId f) {
    std::uint64_t key = (static_cast<std::uint64_t>(f) << 32) | w;
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
            result = m_.valuation(w)[n.fluent];
            break;
        case FormulaKind::Not:
            result = !holds(w, n.lhs);
            break;
        case FormulaKind::And:
            result = holds(w, n.lhs) && holds(w, n.rhs);
            break;
        case FormulaKind::Or:
            result = holds(w, n.lhs) || holds(w, n.rhs);
            break;
        case FormulaKind::Implies:
            result = !holds(w, n.lhs) || holds(w, n.rhs);
            break;
        case FormulaKind::Believes: {
            result = true;
            for (WorldId t : m_.successors(n.agent, w)) {
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
                for (WorldId t : m_.successors(i, w)) {
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
            // Reachability via any agent in the group, zero steps included.
            result = true;
            std::vector<bool> seen(m_.num_worlds(), false);
            std::deque<WorldId> queue{w};
            seen[w] = true;
            while (!queue.empty() && result) {
                WorldId cur = queue.front();
                queue.pop_front();
                if (!holds(cur, n.lhs)) {
                    result = false;
                    break;
                }
                for (AgentId i : n.group) {
                    for (WorldId t : m_.successors(i, cur)) {
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

bool entails(const PointedKripke& state, const FormulaStore& store, FormulaId f) {
    const KripkeStructure& m = *state.structure;
    check_signature(store, f, m.num_fluents(), m.num_agents());
    EntailmentSession session(m, store);
    return session.holds(state.designated, f);
}

// ── Frame classification ────────────────────────────────────────────────────

bool FrameClass::all_reflexive() const {
    return std::all_of(agents.begin(), agents.end(), [](const AgentFlags& a) { return a.reflexive; });
}
bool FrameClass::all_transitive() const {
    return std::all_of(agents.begin(), agents.end(), [](const AgentFlags& a) { return a.transitive; });
}
bool FrameClass::all_euclidean() const {
    return std::all_of(agents.begin(), agents.end(), [](const AgentFlags& a) { return a.euclidean; });
}
bool FrameClass::all_serial() const {
    return std::all_of(agents.begin(), agents.end(), [](const AgentFlags& a) { return a.serial; });
}

FrameClass::Label FrameClass::label() const {
    if (all_reflexive() && all_transitive() && all_euclidean()) return Label::S5;
    if (all_serial() && all_transitive() && all_euclidean()) return Label::KD45;
    return Label::KOnly;
}

FrameClass classify_frame(const KripkeStructure& m) {
    FrameClass fc;
    fc.agents.resize(m.num_agents());
    for (AgentId i = 0; i < m.num_agents(); ++i) {
        auto& flags = fc.agents[i];
        for (WorldId w = 0; w < m.num_worlds(); ++w) {
            auto succ = m.successors(i, w);
            if (!m.has_edge(i, w, w)) flags.reflexive = false;
            if (succ.empty()) flags.serial = false;
            for (WorldId u : succ) {
                for (WorldId v : m.successors(i, u))
                    if (!m.has_edge(i, w, v)) flags.transitive = false;
                for (WorldId v : succ)
                    if (!m.has_edge(i, u, v)) flags.euclidean = false;
            }
        }
    }
    return fc;
}

// ── Bisimulation contraction ────────────────────────────────────────────────

namespace {

// Worlds reachable from `start` over the union of all agent relations,
// in BFS order.
std::vector<WorldId> reachable_worlds(const KripkeStructure& m, WorldId start) {
    std::vector<bool> seen(m.num_worlds(), false);
    std::vector<WorldId> order;
    std::deque<WorldId> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
        WorldId w = queue.front();
        queue.pop_front();
        order.push_back(w);
        for (AgentId i = 0; i < m.num_agents(); ++i) {
            for (WorldId t : m.successors(i, w)) {
                if (!seen[t]) {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }
    return order;
}

// Signature refinement over the listed worlds (local indices). Returns the
// block id of each world; blocks are numbered in first-occurrence order.
std::vector<std::uint32_t> refine_partition(const KripkeStructure& m,
                                            const std::vector<WorldId>& worlds) {
    std::size_t n = worlds.size();
    std::vector<std::int64_t> local(m.num_worlds(), -1);
    for (std::size_t i = 0; i < n; ++i) local[worlds[i]] = static_cast<std::int64_t>(i);

    std::vector<std::uint32_t> block(n);
    std::map<std::vector<bool>, std::uint32_t> initial;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& val = m.valuation(worlds[i]);
        auto it = initial.emplace(val, static_cast<std::uint32_t>(initial.size())).first;
        block[i] = it->second;
    }

    std::size_t count = initial.size();
    while (true) {
        // sig = (current block, sorted set of (agent, successor block))
        std::map<std::pair<std::uint32_t, std::vector<std::uint64_t>>, std::uint32_t> table;
        std::vector<std::uint32_t> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::uint64_t> sig;
            for (AgentId a = 0; a < m.num_agents(); ++a) {
                for (WorldId t : m.successors(a, worlds[i])) {
                    assert(local[t] >= 0);
                    sig.push_back((static_cast<std::uint64_t>(a) << 32) | block[local[t]]);
                }
            }
            std::sort(sig.begin(), sig.end());
            sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
            auto key = std::make_pair(block[i], std::move(sig));
            auto it = table.emplace(std::move(key), static_cast<std::uint32_t>(table.size())).first;
            next[i] = it->second;
        }
        if (table.size() == count) break;
        count = table.size();
        block = std::move(next);
    }
    return block;
}

}  // namespace

PointedKripke bisim_contract(const PointedKripke& state) {
    const KripkeStructure& m = *state.structure;
    std::vector<WorldId> worlds = reachable_worlds(m, state.designated);
    std::vector<std::uint32_t> block = refine_partition(m, worlds);

    std::uint32_t num_blocks = 0;
    for (std::uint32_t b : block) num_blocks = std::max(num_blocks, b + 1);

    // Representative per block: the first member in BFS order.
    std::vector<std::int64_t> rep(num_blocks, -1);
    for (std::size_t i = 0; i < worlds.size(); ++i)
        if (rep[block[i]] < 0) rep[block[i]] = static_cast<std::int64_t>(i);

    KripkeStructure q(m.num_agents(), m.num_fluents());
    for (std::uint32_t b = 0; b < num_blocks; ++b)
        q.add_world(m.valuation(worlds[static_cast<std::size_t>(rep[b])]));

    std::vector<std::int64_t> local(m.num_worlds(), -1);
    for (std::size_t i = 0; i < worlds.size(); ++i) local[worlds[i]] = static_cast<std::int64_t>(i);

    for (AgentId a = 0; a < m.num_agents(); ++a) {
        std::vector<std::vector<WorldId>> out(num_blocks);
        for (std::size_t i = 0; i < worlds.size(); ++i) {
            for (WorldId t : m.successors(a, worlds[i]))
                out[block[i]].push_back(block[static_cast<std::size_t>(local[t])]);
        }
        for (std::uint32_t b = 0; b < num_blocks; ++b) {
            std::sort(out[b].begin(), out[b].end());
            out[b].erase(std::unique(out[b].begin(), out[b].end()), out[b].end());
            q.set_successors(a, b, std::move(out[b]));
        }
    }

    WorldId designated = block[0];  // BFS starts at the designated world
    return make_pointed(std::move(q), designated);
}

// ── Canonical ordering and digest ───────────────────────────────────────────

std::vector<WorldId> canonical_order(const KripkeStructure& m) {
    std::size_t n = m.num_worlds();
    std::vector<std::uint32_t> rank(n);

    {
        std::map<std::vector<bool>, std::uint32_t> table;
        for (WorldId w = 0; w < n; ++w) table.emplace(m.valuation(w), 0);
        std::uint32_t next = 0;
        for (auto& [val, id] : table) id = next++;
        for (WorldId w = 0; w < n; ++w) rank[w] = table[m.valuation(w)];
    }

    // Predecessor lists for the incoming-signature component.
    std::vector<std::vector<std::pair<AgentId, WorldId>>> preds(n);
    for (AgentId a = 0; a < m.num_agents(); ++a)
        for (WorldId w = 0; w < n; ++w)
            for (WorldId t : m.successors(a, w)) preds[t].push_back({a, w});

    auto distinct = [&] {
        std::vector<std::uint32_t> sorted(rank);
        std::sort(sorted.begin(), sorted.end());
        return std::unique(sorted.begin(), sorted.end()) - sorted.begin();
    };

    std::int64_t count = distinct();
    for (std::size_t round = 0; round < n && count < static_cast<std::int64_t>(n); ++round) {
        using Key = std::tuple<std::uint32_t, std::vector<std::uint64_t>, std::vector<std::uint64_t>>;
        std::vector<Key> keys(n);
        for (WorldId w = 0; w < n; ++w) {
            std::vector<std::uint64_t> outs, ins;
            for (AgentId a = 0; a < m.num_agents(); ++a)
                for (WorldId t : m.successors(a, w))
                    outs.push_back((static_cast<std::uint64_t>(a) << 32) | rank[t]);
            for (auto [a, p] : preds[w]) ins.push_back((static_cast<std::uint64_t>(a) << 32) | rank[p]);
            std::sort(outs.begin(), outs.end());
            std::sort(ins.begin(), ins.end());
            keys[w] = {rank[w], std::move(outs), std::move(ins)};
        }
        std::map<Key, std::uint32_t> table;
        for (WorldId w = 0; w < n; ++w) table.emplace(keys[w], 0);
        std::uint32_t next = 0;
        for (auto& [key, id] : table) id = next++;
        std::int64_t new_count = static_cast<std::int64_t>(table.size());
        if (new_count == count) break;  // stable; leftover ties fall to index order
        for (WorldId w = 0; w < n; ++w) rank[w] = table[keys[w]];
        count = new_count;
    }

    std::vector<WorldId> order(n);
    for (WorldId w = 0; w < n; ++w) order[w] = w;
    std::sort(order.begin(), order.end(), [&](WorldId a, WorldId b) {
        if (rank[a] != rank[b]) return rank[a] < rank[b];
        return a < b;
    });
    return order;
}

Digest canonical_digest(const PointedKripke& state) {
    PointedKripke q = bisim_contract(state);
    const KripkeStructure& m = *q.structure;
    std::vector<WorldId> order = canonical_order(m);
    std::vector<std::uint32_t> pos(m.num_worlds());
    for (std::uint32_t i = 0; i < order.size(); ++i) pos[order[i]] = i;

    DigestBuilder b;
    b.add_bytes("EPLANK1", 7);
    b.add_u32(static_cast<std::uint32_t>(m.num_worlds()));
    b.add_u32(static_cast<std::uint32_t>(m.num_agents()));
    b.add_u32(static_cast<std::uint32_t>(m.num_fluents()));
    b.add_u32(pos[q.designated]);
    for (WorldId w : order) b.add_bits(m.valuation(w));
    for (AgentId a = 0; a < m.num_agents(); ++a) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (WorldId w = 0; w < m.num_worlds(); ++w)
            for (WorldId t : m.successors(a, w)) edges.push_back({pos[w], pos[t]});
        std::sort(edges.begin(), edges.end());
        b.add_u32(static_cast<std::uint32_t>(edges.size()));
        for (auto [s, t] : edges) {
            b.add_u32(s);
            b.add_u32(t);
        }
    }
    return b.finish();
}

// ── Textual dump ────────────────────────────────────────────────────────────

std::string dump(const PointedKripke& state, const Vocabulary& vocab) {
    const KripkeStructure& m = *state.structure;
    std::ostringstream out;
    out << "worlds " << m.num_worlds() << " designated " << state.designated << "\n";
    for (WorldId w = 0; w < m.num_worlds(); ++w) {
        std::vector<std::string> names;
        for (FluentId f = 0; f < m.num_fluents(); ++f)
            if (m.valuation(w)[f]) names.push_back(vocab.fluent_name(f));
        std::sort(names.begin(), names.end());
        out << "world " << w << " {";
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i > 0) out << " ";
            out << names[i];
        }
        out << "}\n";
    }
    for (AgentId a = 0; a < m.num_agents(); ++a)
        for (WorldId w = 0; w < m.num_worlds(); ++w)
            for (WorldId t : m.successors(a, w))
                out << "edge " << vocab.agent_name(a) << " " << w << " " << t << "\n";
    return out.str();
}

}  // namespace eplan
