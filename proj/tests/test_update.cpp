#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "eplan/errors.hpp"
#include "eplan/update.hpp"
#include "oracle.hpp"

using namespace eplan;

namespace {

// Two-world coin: fluent 0 unknown to everyone, true at the designated world.
PointedKripke coin_model(std::size_t num_agents) {
    KripkeStructure m(num_agents, 1);
    m.add_world({true});
    m.add_world({false});
    for (AgentId a = 0; a < num_agents; ++a)
        for (WorldId w = 0; w < 2; ++w)
            for (WorldId t = 0; t < 2; ++t) m.add_edge(a, w, t);
    return make_pointed(std::move(m), 0);
}

ObservabilityMap uniform_obs(std::size_t num_agents, ObsGroup group) {
    ObservabilityMap map;
    map.per_agent.assign(num_agents, ObsEntry{group, std::nullopt});
    return map;
}

// Reference construction for a fully observant ontic action: keep the worlds
// where the action can run, rewrite their valuations, restrict the edges.
PointedKripke direct_ontic(const PointedKripke& s, const ActionSpec& a, const FormulaStore& st) {
    const KripkeStructure& m = *s.structure;
    std::vector<std::int64_t> remap(m.num_worlds(), -1);
    KripkeStructure out(m.num_agents(), m.num_fluents());
    for (WorldId w = 0; w < m.num_worlds(); ++w) {
        if (!entails({s.structure, w}, st, a.executability)) continue;
        std::vector<bool> val = m.valuation(w);
        for (const OnticAssignment& as : a.assignments) {
            bool fire = !as.condition || entails({s.structure, w}, st, *as.condition);
            if (fire) val[as.fluent] = as.value;
        }
        remap[w] = out.add_world(std::move(val));
    }
    for (AgentId ag = 0; ag < m.num_agents(); ++ag)
        for (WorldId w = 0; w < m.num_worlds(); ++w)
            if (remap[w] >= 0)
                for (WorldId t : m.successors(ag, w))
                    if (remap[t] >= 0)
                        out.add_edge(ag, static_cast<WorldId>(remap[w]),
                                     static_cast<WorldId>(remap[t]));
    return bisim_contract(
        make_pointed(std::move(out), static_cast<WorldId>(remap[s.designated])));
}

}  // namespace

TEST_CASE("the skip model leaves states bisimilar to themselves") {
    FormulaStore st;
    UpdateModel skip = make_skip_model(2, st);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 50; ++i) {
        PointedKripke s = test::random_pointed(rng);
        ApplyStats stats;
        PointedKripke r = apply_update(s, skip, st, &stats);
        CHECK(canonical_digest(r) == canonical_digest(s));
        CHECK(stats.product_worlds <= s.structure->num_worlds());
    }
}

TEST_CASE("a public announcement collapses the coin model") {
    FormulaStore st;
    UpdateModel announce;
    announce.name = "announce-f";
    announce.num_events = 1;
    announce.pre = {st.atom(0)};
    announce.post = {{}};
    announce.relations.assign(3, {{0, 0}});
    announce.designated = 0;

    PointedKripke s = coin_model(3);
    PointedKripke r = apply_update(s, announce, st);
    CHECK(r.structure->num_worlds() == 1);
    CHECK(entails(r, st, st.common({0, 1, 2}, st.atom(0))));
}

TEST_CASE("inexecutable models are refused") {
    FormulaStore st;
    UpdateModel u = make_skip_model(1, st);
    u.pre = {st.falsum()};
    CHECK_THROWS_AS(apply_update(coin_model(1), u, st), NotExecutableError);
}

TEST_CASE("compiled fully observant ontic actions equal the direct rewrite") {
    FormulaStore st;
    std::mt19937_64 rng(123);
    int checked = 0;
    while (checked < 3) {
        PointedKripke s = test::random_pointed(rng, 5, 2, 3);
        ActionSpec a;
        a.name = "ontic";
        a.kind = ActionKind::Ontic;
        a.executability = rng() % 2 == 0 ? st.truth() : st.atom(rng() % 3);
        a.assignments.push_back(
            {static_cast<FluentId>(rng() % 3), rng() % 2 == 0, std::nullopt});
        if (rng() % 2 == 0)
            a.assignments.push_back({static_cast<FluentId>((a.assignments[0].fluent + 1) % 3),
                                     rng() % 2 == 0, st.atom(rng() % 3)});
        a.observability = uniform_obs(2, ObsGroup::Fully);
        if (!is_executable(s, a, st)) continue;
        UpdateModel u = compile_action(a, s, st);
        CHECK(canonical_digest(apply_update(s, u, st)) ==
              canonical_digest(direct_ontic(s, a, st)));
        ++checked;
    }
}

TEST_CASE("sensing splits the sensor's beliefs and spares the oblivious") {
    FormulaStore st;
    ActionSpec peek;
    peek.name = "peek";
    peek.kind = ActionKind::Sensing;
    peek.executability = st.truth();
    peek.sensed = 0;
    peek.observability = uniform_obs(2, ObsGroup::Oblivious);
    peek.observability.per_agent[0] = {ObsGroup::Fully, std::nullopt};

    PointedKripke s = coin_model(2);
    UpdateModel u = compile_action(peek, s, st);
    CHECK(u.designated == 0);  // the coin shows heads at the designated world
    PointedKripke r = apply_update(s, u, st);
    FormulaId f = st.atom(0);
    CHECK(entails(r, st, st.believes(0, f)));
    CHECK_FALSE(entails(r, st, st.believes(1, f)));
    CHECK_FALSE(entails(r, st, st.believes(1, st.negation(f))));
    // the executability formula of a follow-up can now mention a's knowledge
    ActionSpec follow;
    follow.name = "follow";
    follow.kind = ActionKind::Ontic;
    follow.executability = st.believes(0, f);
    follow.assignments.push_back({0, true, std::nullopt});
    follow.observability = uniform_obs(2, ObsGroup::Fully);
    CHECK(is_executable(r, follow, st));
    CHECK_FALSE(is_executable(s, follow, st));
}

TEST_CASE("sensing a false fluent designates the negative outcome") {
    FormulaStore st;
    ActionSpec peek;
    peek.name = "peek";
    peek.kind = ActionKind::Sensing;
    peek.executability = st.truth();
    peek.sensed = 0;
    peek.observability = uniform_obs(1, ObsGroup::Fully);
    PointedKripke s = coin_model(1);
    PointedKripke tails{s.structure, 1};
    UpdateModel u = compile_action(peek, tails, st);
    CHECK(u.designated == 1);
    PointedKripke r = apply_update(tails, u, st);
    CHECK(entails(r, st, st.believes(0, st.negation(st.atom(0)))));
}

TEST_CASE("partial observers of an announcement learn that the observer learned") {
    FormulaStore st;
    ActionSpec tell;
    tell.name = "tell";
    tell.kind = ActionKind::Announcement;
    tell.executability = st.truth();
    tell.announced = st.atom(0);
    tell.observability = uniform_obs(2, ObsGroup::Oblivious);
    tell.observability.per_agent[0] = {ObsGroup::Fully, std::nullopt};
    tell.observability.per_agent[1] = {ObsGroup::Partially, std::nullopt};

    PointedKripke s = coin_model(2);
    PointedKripke r = apply_update(s, compile_action(tell, s, st), st);
    FormulaId f = st.atom(0);
    CHECK(entails(r, st, st.believes(0, f)));
    CHECK(entails(r, st, st.believes(1, st.disjunction(st.believes(0, f),
                                                       st.believes(0, st.negation(f))))));
    CHECK_FALSE(entails(r, st, st.believes(1, f)));
}

TEST_CASE("announcing a formula that fails at the designated world is inexecutable") {
    FormulaStore st;
    ActionSpec tell;
    tell.name = "tell";
    tell.kind = ActionKind::Announcement;
    tell.executability = st.truth();
    tell.announced = st.negation(st.atom(0));
    tell.observability = uniform_obs(1, ObsGroup::Fully);
    PointedKripke s = coin_model(1);
    UpdateModel u = compile_action(tell, s, st);
    CHECK_THROWS_AS(apply_update(s, u, st), NotExecutableError);
}

TEST_CASE("observability guards resolve against the pre-update state") {
    FormulaStore st;
    ActionSpec tell;
    tell.name = "tell";
    tell.kind = ActionKind::Announcement;
    tell.executability = st.truth();
    tell.announced = st.atom(0);
    tell.observability = uniform_obs(2, ObsGroup::Oblivious);
    tell.observability.per_agent[0] = {ObsGroup::Fully, std::nullopt};
    tell.observability.per_agent[1] = {ObsGroup::Fully, st.negation(st.atom(0))};  // fails

    PointedKripke s = coin_model(2);
    PointedKripke r = apply_update(s, compile_action(tell, s, st), st);
    CHECK(entails(r, st, st.believes(0, st.atom(0))));
    CHECK_FALSE(entails(r, st, st.believes(1, st.atom(0))));  // guard dropped b to oblivious
}

TEST_CASE("partially observant agents are rejected on ontic actions") {
    FormulaStore st;
    ActionSpec a;
    a.name = "bad";
    a.kind = ActionKind::Ontic;
    a.executability = st.truth();
    a.assignments.push_back({0, true, std::nullopt});
    a.observability = uniform_obs(2, ObsGroup::Fully);
    a.observability.per_agent[1].group = ObsGroup::Partially;
    CHECK_THROWS_AS(compile_action(a, coin_model(2), st), EplanError);
}

TEST_CASE("property: product size never exceeds worlds x events") {
    FormulaStore st;
    std::mt19937_64 rng(321);
    int checked = 0;
    while (checked < 60) {
        PointedKripke s = test::random_pointed(rng);
        ActionSpec a = test::random_action(rng, st, 3, 2);
        UpdateModel u = compile_action(a, s, st);
        if (!entails(s, st, u.pre[u.designated])) continue;
        ApplyStats stats;
        apply_update(s, u, st, &stats);
        CHECK(stats.product_worlds <= s.structure->num_worlds() * u.num_events);
        ++checked;
    }
}

TEST_CASE("property: oblivious agents keep their depth-0 beliefs under sensing/announcement") {
    FormulaStore st;
    std::vector<FormulaId> formulas = test::enumerate_formulas(st, 3, 2, 10);
    std::mt19937_64 rng(654);
    int checked = 0;
    while (checked < 60) {
        PointedKripke s = test::random_pointed(rng);
        ActionSpec a = test::random_action(rng, st, 3, 2);
        if (a.kind == ActionKind::Ontic) continue;
        bool any_oblivious = false;
        for (auto& entry : a.observability.per_agent) {
            entry.guard.reset();
            any_oblivious |= entry.group == ObsGroup::Oblivious;
        }
        if (!any_oblivious) continue;
        UpdateModel u = compile_action(a, s, st);
        if (!entails(s, st, u.pre[u.designated])) continue;
        PointedKripke r = apply_update(s, u, st);
        for (AgentId agent = 0; agent < 2; ++agent) {
            if (a.observability.per_agent[agent].group != ObsGroup::Oblivious) continue;
            for (FormulaId psi : formulas) {
                FormulaId belief = st.believes(agent, psi);
                CHECK(entails(s, st, belief) == entails(r, st, belief));
            }
        }
        ++checked;
    }
}

TEST_CASE("property: fully observant ontic effects become common knowledge") {
    FormulaStore st;
    std::mt19937_64 rng(987);
    int checked = 0;
    while (checked < 60) {
        PointedKripke s = test::random_pointed(rng);
        ActionSpec a;
        a.name = "set";
        a.kind = ActionKind::Ontic;
        a.executability = rng() % 2 == 0 ? st.truth() : st.atom(rng() % 3);
        a.assignments.push_back(
            {static_cast<FluentId>(rng() % 3), rng() % 2 == 0, std::nullopt});
        a.observability = uniform_obs(2, ObsGroup::Oblivious);
        AgentSet group;
        for (AgentId i = 0; i < 2; ++i)
            if (rng() % 2 == 0) {
                a.observability.per_agent[i].group = ObsGroup::Fully;
                group.push_back(i);
            }
        if (group.empty()) continue;
        if (!is_executable(s, a, st)) continue;
        PointedKripke r = apply_update(s, compile_action(a, s, st), st);
        for (const OnticAssignment& as : a.assignments) {
            FormulaId lit =
                as.value ? st.atom(as.fluent) : st.negation(st.atom(as.fluent));
            CHECK(entails(r, st, st.common(group, lit)));
        }
        ++checked;
    }
}

TEST_CASE("applying one action to bisimilar inputs yields digest-equal results") {
    FormulaStore st;
    std::mt19937_64 rng(2468);
    int checked = 0;
    while (checked < 20) {
        PointedKripke s1 = test::random_pointed(rng);
        // bisimilar variant: double every world, copy the edges within each copy
        const KripkeStructure& m = *s1.structure;
        std::size_t n = m.num_worlds();
        KripkeStructure doubled(m.num_agents(), m.num_fluents());
        for (std::size_t copy = 0; copy < 2; ++copy)
            for (WorldId w = 0; w < n; ++w) doubled.add_world(m.valuation(w));
        for (AgentId a = 0; a < m.num_agents(); ++a)
            for (WorldId w = 0; w < n; ++w)
                for (WorldId t : m.successors(a, w)) {
                    doubled.add_edge(a, w, t);
                    doubled.add_edge(a, static_cast<WorldId>(w + n),
                                     static_cast<WorldId>(t + n));
                }
        PointedKripke s2 =
            make_pointed(std::move(doubled), static_cast<WorldId>(s1.designated + n));
        REQUIRE(canonical_digest(s1) == canonical_digest(s2));

        ActionSpec a = test::random_action(rng, st, 3, 2);
        UpdateModel u1 = compile_action(a, s1, st);
        if (!entails(s1, st, u1.pre[u1.designated])) continue;
        UpdateModel u2 = compile_action(a, s2, st);
        CHECK(canonical_digest(apply_update(s1, u1, st)) ==
              canonical_digest(apply_update(s2, u2, st)));
        ++checked;
    }
}

TEST_CASE("property: the kripke and possibility update paths agree up to bisimilarity") {
    FormulaStore st;
    PossibilityStore ps(2, 3);
    std::mt19937_64 rng(555);
    int checked = 0;
    while (checked < 40) {
        PointedKripke s = test::random_pointed(rng);
        ActionSpec a = test::random_action(rng, st, 3, 2);
        Possibility p = ps.from_kripke(s);
        UpdateModel u = compile_action(a, s, st);
        CHECK(compile_action(a, p, st).designated == u.designated);
        if (!entails(s, st, u.pre[u.designated])) continue;
        PointedKripke via_kripke = apply_update(s, u, st);
        Possibility via_possibility = apply_update(p, u, st, ps);
        CHECK(via_possibility->digest == canonical_digest(via_kripke));
        ++checked;
    }
}
