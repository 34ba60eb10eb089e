#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "eplan/possibility.hpp"
#include "oracle.hpp"

using namespace eplan;

namespace {

PointedKripke single_reflexive_world() {
    KripkeStructure m(2, 1);
    m.add_world({true});
    m.add_edge(0, 0, 0);
    m.add_edge(1, 0, 0);
    return make_pointed(std::move(m), 0);
}

PointedKripke two_world_coin() {
    KripkeStructure m(1, 1);
    m.add_world({true});
    m.add_world({false});
    for (WorldId w = 0; w < 2; ++w)
        for (WorldId t = 0; t < 2; ++t) m.add_edge(0, w, t);
    return make_pointed(std::move(m), 0);
}

}  // namespace

TEST_CASE("a single reflexive world becomes one self-looping node") {
    PossibilityStore ps(2, 1);
    Possibility p = ps.from_kripke(single_reflexive_world());
    CHECK(num_nodes(p) == 1);
    CHECK(p->valuation[0]);
    for (AgentId a = 0; a < 2; ++a) {
        REQUIRE(p->successors[a].size() == 1);
        CHECK(p->successors[a][0] == p);
    }
}

TEST_CASE("an indistinguishability pair keeps both nodes and the complete edges") {
    PossibilityStore ps(1, 1);
    Possibility p = ps.from_kripke(two_world_coin());
    CHECK(num_nodes(p) == 2);
    CHECK(p->successors[0].size() == 2);
    PointedKripke back = to_kripke(p);
    CHECK(back.structure->num_worlds() == 2);
    CHECK(canonical_digest(back) == canonical_digest(two_world_coin()));
}

TEST_CASE("cyclic structures survive the round trip") {
    // two mutually accessible worlds with different valuations
    KripkeStructure m(1, 1);
    m.add_world({true});
    m.add_world({false});
    m.add_edge(0, 0, 1);
    m.add_edge(0, 1, 0);
    PointedKripke s = make_pointed(std::move(m), 0);
    PossibilityStore ps(1, 1);
    Possibility p = ps.from_kripke(s);
    CHECK(num_nodes(p) == 2);
    PointedKripke back = to_kripke(p);
    CHECK(back.structure->has_edge(0, 0, 1));
    CHECK(back.structure->has_edge(0, 1, 0));
    CHECK_FALSE(back.structure->has_edge(0, 0, 0));
    CHECK(canonical_digest(back) == canonical_digest(s));
}

TEST_CASE("vacuous belief at a node with no successors") {
    FormulaStore st;
    KripkeStructure m(1, 1);
    m.add_world({true});
    PointedKripke s = make_pointed(std::move(m), 0);
    PossibilityStore ps(1, 1);
    Possibility p = ps.from_kripke(s);
    CHECK(entails_p(p, st, st.believes(0, st.falsum())));
    CHECK_FALSE(classify_frame(*to_kripke(p).structure).agents[0].serial);
}

TEST_CASE("interning shares bisimilar states") {
    PossibilityStore ps(1, 1);
    Possibility p1 = ps.from_kripke(two_world_coin());
    // same model with permuted ids
    KripkeStructure m(1, 1);
    m.add_world({false});
    m.add_world({true});
    for (WorldId w = 0; w < 2; ++w)
        for (WorldId t = 0; t < 2; ++t) m.add_edge(0, w, t);
    Possibility p2 = ps.from_kripke(make_pointed(std::move(m), 1));
    CHECK(p1 == p2);
    CHECK(ps.size() == 2);  // the two coin faces, nothing else
}

TEST_CASE("translating back and forth reaches the canonical fixpoint") {
    PossibilityStore ps(1, 1);
    Possibility p = ps.from_kripke(two_world_coin());
    CHECK(ps.from_kripke(to_kripke(p)) == p);
}

TEST_CASE("contracting before translating lands on the same interned graph") {
    PossibilityStore ps(2, 3);
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 40; ++i) {
        PointedKripke s = test::random_pointed(rng, 5, 2, 3);
        CHECK(ps.from_kripke(bisim_contract(s)) == ps.from_kripke(s));
    }
}

TEST_CASE("property: the two representations entail the same formulas") {
    FormulaStore st;
    std::vector<FormulaId> formulas = test::enumerate_formulas(st, 3, 2, 100);
    PossibilityStore ps(2, 3);
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 120; ++i) {
        PointedKripke s = test::random_pointed(rng);
        Possibility p = ps.from_kripke(s);
        CHECK(p->digest == canonical_digest(s));
        for (FormulaId f : formulas) {
            CAPTURE(i);
            CHECK(entails_p(p, st, f) == entails(s, st, f));
        }
        // inverse embedding preserves entailment as well
        PointedKripke back = to_kripke(p);
        CHECK(canonical_digest(back) == p->digest);
    }
}

TEST_CASE("property: root identity coincides with quotient isomorphism") {
    PossibilityStore ps(2, 3);
    std::mt19937_64 rng(777);
    std::vector<std::pair<Digest, Possibility>> seen;
    for (int i = 0; i < 80; ++i) {
        PointedKripke s = test::random_pointed(rng);
        Possibility p = ps.from_kripke(s);
        Digest d = canonical_digest(s);
        for (auto& [digest, other] : seen) CHECK((digest == d) == (other == p));
        seen.push_back({d, p});
    }
}

TEST_CASE("possibility dump mirrors the kripke dump") {
    Vocabulary vocab = test::small_vocabulary(1, 1);
    PossibilityStore ps(1, 1);
    Possibility p = ps.from_kripke(two_world_coin());
    CHECK(dump(p, vocab) == dump(to_kripke(p), vocab));
    CHECK(dump(p, vocab).substr(0, 6) == "worlds");
}
