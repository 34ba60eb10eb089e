#include "eplan/update.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "eplan/errors.hpp"

namespace eplan {

namespace {

void validate_model(const UpdateModel& u, std::size_t num_agents, std::size_t num_fluents) {
    if (u.num_events == 0) throw EplanError("update model '" + u.name + "' has no events");
    if (u.designated >= u.num_events)
        throw EplanError("update model '" + u.name + "' designates a missing event");
    if (u.pre.size() != u.num_events || u.post.size() != u.num_events)
        throw EplanError("update model '" + u.name + "' lacks pre/post entries for some event");
    if (u.relations.size() != num_agents)
        throw EplanError("update model '" + u.name + "' lacks relation entries for some agent");
    for (const auto& rel : u.relations)
        for (auto [from, to] : rel)
            if (from >= u.num_events || to >= u.num_events)
                throw EplanError("update model '" + u.name + "' relates missing events");
    for (const auto& assignments : u.post)
        for (auto [fluent, formula] : assignments)
            if (fluent >= num_fluents)
                throw EplanError("update model '" + u.name + "' assigns an unknown fluent");
}

// Event relation as adjacency lists, sorted.
std::vector<std::vector<std::vector<EventId>>> event_adjacency(const UpdateModel& u) {
    std::vector<std::vector<std::vector<EventId>>> adj(u.relations.size());
    for (std::size_t a = 0; a < u.relations.size(); ++a) {
        adj[a].resize(u.num_events);
        for (auto [from, to] : u.relations[a]) adj[a][from].push_back(to);
        for (auto& list : adj[a]) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
    }
    return adj;
}

}  // namespace

UpdateModel make_skip_model(std::size_t num_agents, FormulaStore& store) {
    UpdateModel u;
    u.name = "skip";
    u.num_events = 1;
    u.pre = {store.truth()};
    u.post = {{}};
    u.relations.assign(num_agents, {{0, 0}});
    u.designated = 0;
    return u;
}

PointedKripke apply_update(const PointedKripke& state, const UpdateModel& u,
                           const FormulaStore& store, ApplyStats* stats) {
    const KripkeStructure& m = *state.structure;
    validate_model(u, m.num_agents(), m.num_fluents());
    for (FormulaId f : u.pre) check_signature(store, f, m.num_fluents(), m.num_agents());
    for (const auto& assignments : u.post)
        for (auto [fluent, formula] : assignments)
            check_signature(store, formula, m.num_fluents(), m.num_agents());

    EntailmentSession session(m, store);
    if (!session.holds(state.designated, u.pre[u.designated]))
        throw NotExecutableError("'" + u.name +
                                 "' is not executable: designated event precondition fails");

    // Product worlds: (world, event) pairs whose event precondition holds at
    // the world, numbered world-major.
    std::vector<std::int64_t> pair_id(m.num_worlds() * u.num_events, -1);
    std::vector<std::pair<WorldId, EventId>> pairs;
    for (WorldId w = 0; w < m.num_worlds(); ++w) {
        for (EventId e = 0; e < u.num_events; ++e) {
            if (session.holds(w, u.pre[e])) {
                pair_id[w * u.num_events + e] = static_cast<std::int64_t>(pairs.size());
                pairs.push_back({w, e});
            }
        }
    }

    KripkeStructure product(m.num_agents(), m.num_fluents());
    for (auto [w, e] : pairs) {
        std::vector<bool> val = m.valuation(w);
        for (auto [fluent, formula] : u.post[e]) val[fluent] = session.holds(w, formula);
        product.add_world(std::move(val));
    }

    auto adj = event_adjacency(u);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        auto [w, e] = pairs[p];
        for (AgentId a = 0; a < m.num_agents(); ++a) {
            std::vector<WorldId> out;
            for (WorldId w2 : m.successors(a, w)) {
                for (EventId e2 : adj[a][e]) {
                    std::int64_t q = pair_id[w2 * u.num_events + e2];
                    if (q >= 0) out.push_back(static_cast<WorldId>(q));
                }
            }
            std::sort(out.begin(), out.end());
            product.set_successors(a, static_cast<WorldId>(p), std::move(out));
        }
    }

    auto designated =
        static_cast<WorldId>(pair_id[state.designated * u.num_events + u.designated]);
    PointedKripke result = bisim_contract(make_pointed(std::move(product), designated));
    if (stats != nullptr) {
        stats->product_worlds = pairs.size();
        stats->contracted_worlds = result.structure->num_worlds();
    }
    return result;
}

Possibility apply_update(Possibility p, const UpdateModel& u, const FormulaStore& store,
                         PossibilityStore& pstore, ApplyStats* stats) {
    std::size_t num_agents = p->successors.size();
    std::size_t num_fluents = p->valuation.size();
    validate_model(u, num_agents, num_fluents);

    if (!entails_p(p, store, u.pre[u.designated]))
        throw NotExecutableError("'" + u.name +
                                 "' is not executable: designated event precondition fails");

    // The product is computed natively on the node graph: every node is the
    // root of its own possibility, so event preconditions are evaluated by
    // entails_p at each node.
    std::vector<const PossNode*> nodes{p};
    std::unordered_map<const PossNode*, std::size_t> index{{p, 0}};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const auto& succ : nodes[i]->successors)
            for (const PossNode* t : succ)
                if (index.emplace(t, nodes.size()).second) nodes.push_back(t);
    }

    std::vector<std::int64_t> pair_id(nodes.size() * u.num_events, -1);
    std::vector<std::pair<std::size_t, EventId>> pairs;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (EventId e = 0; e < u.num_events; ++e) {
            if (entails_p(nodes[i], store, u.pre[e])) {
                pair_id[i * u.num_events + e] = static_cast<std::int64_t>(pairs.size());
                pairs.push_back({i, e});
            }
        }
    }

    KripkeStructure product(num_agents, num_fluents);
    for (auto [i, e] : pairs) {
        std::vector<bool> val = nodes[i]->valuation;
        for (auto [fluent, formula] : u.post[e]) val[fluent] = entails_p(nodes[i], store, formula);
        product.add_world(std::move(val));
    }

    auto adj = event_adjacency(u);
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        auto [i, e] = pairs[pi];
        for (AgentId a = 0; a < num_agents; ++a) {
            std::vector<WorldId> out;
            for (const PossNode* t : nodes[i]->successors[a]) {
                std::size_t j = index[t];
                for (EventId e2 : adj[a][e]) {
                    std::int64_t q = pair_id[j * u.num_events + e2];
                    if (q >= 0) out.push_back(static_cast<WorldId>(q));
                }
            }
            std::sort(out.begin(), out.end());
            product.set_successors(a, static_cast<WorldId>(pi), std::move(out));
        }
    }

    auto designated = static_cast<WorldId>(pair_id[index[p] * u.num_events + u.designated]);
    if (stats != nullptr) stats->product_worlds = pairs.size();
    Possibility result = pstore.from_kripke(make_pointed(std::move(product), designated));
    if (stats != nullptr) stats->contracted_worlds = num_nodes(result);
    return result;
}

// ── Classical action compilation ────────────────────────────────────────────

namespace {

std::vector<ObsGroup> resolve_observability(const ActionSpec& a,
                                            const std::function<bool(FormulaId)>& holds) {
    std::vector<ObsGroup> groups(a.observability.per_agent.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const ObsEntry& entry = a.observability.per_agent[i];
        if (entry.guard && !holds(*entry.guard))
            groups[i] = ObsGroup::Oblivious;
        else
            groups[i] = entry.group;
    }
    return groups;
}

void validate_spec(const ActionSpec& a) {
    if (a.kind == ActionKind::Ontic) {
        for (const ObsEntry& entry : a.observability.per_agent)
            if (entry.group == ObsGroup::Partially)
                throw EplanError("ontic action '" + a.name +
                                 "' admits no partially observant agents");
        std::vector<FluentId> assigned;
        for (const OnticAssignment& as : a.assignments) assigned.push_back(as.fluent);
        std::sort(assigned.begin(), assigned.end());
        if (std::adjacent_find(assigned.begin(), assigned.end()) != assigned.end())
            throw EplanError("ontic action '" + a.name + "' assigns a fluent twice");
    }
}

UpdateModel compile_impl(const ActionSpec& a, const std::function<bool(FormulaId)>& holds,
                         FormulaStore& store) {
    validate_spec(a);
    std::vector<ObsGroup> groups = resolve_observability(a, holds);
    std::size_t num_agents = groups.size();

    UpdateModel u;
    u.name = a.name;

    if (a.kind == ActionKind::Ontic) {
        // events: 0 = effect, 1 = skip
        u.num_events = 2;
        u.pre = {a.executability, store.truth()};
        u.post.resize(2);
        for (const OnticAssignment& as : a.assignments) {
            FormulaId cell;
            if (as.condition) {
                FormulaId old = store.atom(as.fluent);
                cell = as.value ? store.disjunction(*as.condition, old)
                                : store.conjunction(store.negation(*as.condition), old);
            } else {
                cell = as.value ? store.truth() : store.falsum();
            }
            u.post[0].push_back({as.fluent, cell});
        }
        std::sort(u.post[0].begin(), u.post[0].end());
        u.relations.resize(num_agents);
        for (std::size_t i = 0; i < num_agents; ++i) {
            u.relations[i] = groups[i] == ObsGroup::Fully
                                 ? std::vector<std::pair<EventId, EventId>>{{0, 0}, {1, 1}}
                                 : std::vector<std::pair<EventId, EventId>>{{0, 1}, {1, 1}};
        }
        u.designated = 0;
        return u;
    }

    // Sensing and announcements share the three-event shape:
    // 0 = outcome holds, 1 = outcome fails, 2 = skip.
    FormulaId outcome =
        a.kind == ActionKind::Sensing ? store.atom(a.sensed) : a.announced;
    u.num_events = 3;
    u.pre = {store.conjunction(a.executability, outcome),
             store.conjunction(a.executability, store.negation(outcome)), store.truth()};
    u.post.resize(3);
    u.relations.resize(num_agents);
    for (std::size_t i = 0; i < num_agents; ++i) {
        switch (groups[i]) {
            case ObsGroup::Fully:
                u.relations[i] = {{0, 0}, {1, 1}, {2, 2}};
                break;
            case ObsGroup::Partially:
                u.relations[i] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}};
                break;
            case ObsGroup::Oblivious:
                u.relations[i] = {{0, 2}, {1, 2}, {2, 2}};
                break;
        }
    }
    if (a.kind == ActionKind::Sensing)
        u.designated = holds(outcome) ? 0 : 1;
    else
        u.designated = 0;  // announcements assert the announced formula
    return u;
}

}  // namespace

UpdateModel compile_action(const ActionSpec& a, const PointedKripke& state, FormulaStore& store) {
    if (a.observability.per_agent.size() != state.structure->num_agents())
        throw EplanError("action '" + a.name + "' does not classify every agent");
    EntailmentSession session(*state.structure, store);
    WorldId designated = state.designated;
    return compile_impl(
        a, [&](FormulaId f) { return session.holds(designated, f); }, store);
}

UpdateModel compile_action(const ActionSpec& a, Possibility state, FormulaStore& store) {
    if (a.observability.per_agent.size() != state->successors.size())
        throw EplanError("action '" + a.name + "' does not classify every agent");
    return compile_impl(
        a, [&](FormulaId f) { return entails_p(state, store, f); }, store);
}

bool is_executable(const PointedKripke& state, const ActionSpec& a, const FormulaStore& store) {
    return entails(state, store, a.executability);
}

bool is_executable(Possibility state, const ActionSpec& a, const FormulaStore& store) {
    return entails_p(state, store, a.executability);
}

}  // namespace eplan
