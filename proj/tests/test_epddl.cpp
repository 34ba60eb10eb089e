#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "eplan/epddl.hpp"
#include "eplan/errors.hpp"

using namespace eplan;
using namespace eplan::epddl;

namespace {

std::string domains_dir() { return EPLAN_DOMAINS_DIR; }
std::string fixtures_dir() { return EPLAN_FIXTURE_DIR; }

const char* kTinyDomain = R"((define (domain tiny)
  (:epddl 0.1)
  (:agents a b)
  (:predicates (p) (q))
  (:action flip
    :act-type ontic
    :effect (p)
    :observers (a b))))";

ProblemDecl tiny_problem(const DomainDecl& d, const std::string& init,
                         const std::string& goal = "(p)") {
    std::string text = "(define (problem t) (:domain tiny) (:init " + init + ") (:goal " +
                       goal + "))";
    return parse_problem(text, "<test>", d);
}

}  // namespace

TEST_CASE("the coin domain file parses into its three schemas") {
    DomainDecl d = parse_domain_file(domains_dir() + "/coin.epddl");
    CHECK(d.name == "coin");
    CHECK(d.version == "0.1");
    REQUIRE(d.actions.size() == 3);
    CHECK(d.actions[0].name == "open");
    CHECK(d.actions[0].kind == ActionKind::Ontic);
    CHECK(d.actions[1].name == "peek_a");
    CHECK(d.actions[1].kind == ActionKind::Sensing);
    CHECK(d.agents == std::vector<std::string>{"a", "b", "c"});
    CHECK(d.update_models.empty());
}

TEST_CASE("bare belief statements are rejected in :init") {
    DomainDecl d = parse_domain(kTinyDomain, "<test>");
    CHECK_THROWS_WITH_AS(tiny_problem(d, "(b a (p))"),
                         doctest::Contains("unsupported initial statement"), ParseError);
}

TEST_CASE("an empty agent list is rejected") {
    CHECK_THROWS_AS(parse_domain("(define (domain x) (:agents))", "<test>"), ParseError);
}

TEST_CASE("duplicate and reserved names are rejected") {
    CHECK_THROWS_AS(
        parse_domain("(define (domain x) (:agents a a) (:predicates (p)))", "<test>"),
        ParseError);
    CHECK_THROWS_AS(
        parse_domain("(define (domain x) (:agents a) (:predicates (common)))", "<test>"),
        ParseError);
}

TEST_CASE("type errors surface at grounding") {
    DomainDecl d = parse_domain_file(fixtures_dir() + "/ground.epddl");
    std::string bad = "(define (problem p) (:domain ground-demo) (:objects b1 - box)"
                      " (:init (ready)) (:goal (holds b1 a)))";
    ProblemDecl p = parse_problem(bad, "<test>", d);
    CHECK_THROWS_WITH_AS(ground(d, p), doctest::Contains("type"), ParseError);
}

TEST_CASE("grounding instantiates schemas over typed objects deterministically") {
    DomainDecl d = parse_domain_file(fixtures_dir() + "/ground.epddl");
    ProblemDecl p = parse_problem_file(fixtures_dir() + "/ground-p1.epddl", d);
    PlanningTask task = ground(d, p);

    auto count_prefix = [&](const std::string& prefix) {
        std::size_t n = 0;
        for (const auto& ga : task.actions)
            if (ga.name.rfind(prefix, 0) == 0) ++n;
        return n;
    };
    CHECK(count_prefix("nop") == 1);     // no parameters
    CHECK(count_prefix("signal") == 1);
    CHECK(count_prefix("wave_") == 3);   // one agent parameter
    CHECK(count_prefix("greet_") == 9);  // two agent parameters
    CHECK(count_prefix("grab_") == 6);   // agent x box
    CHECK(task.actions.size() == 20);

    PlanningTask again = ground(d, p);
    for (std::size_t i = 0; i < task.actions.size(); ++i)
        CHECK(task.actions[i].name == again.actions[i].name);

    // grab_a_b1 resolved against its binding
    const auto& grab = *std::find_if(task.actions.begin(), task.actions.end(),
                                     [](const GroundAction& ga) { return ga.name == "grab_a_b1"; });
    const auto& spec = std::get<ActionSpec>(grab.op);
    CHECK(task.vocab.fluent_name(spec.assignments.at(0).fluent) == "holds_a_b1");
    CHECK(spec.observability.per_agent[*task.vocab.find_agent("a")].group == ObsGroup::Fully);
    CHECK(spec.observability.per_agent[*task.vocab.find_agent("b")].group ==
          ObsGroup::Oblivious);
}

TEST_CASE("the grounding cap trips with a clear message") {
    DomainDecl d = parse_domain_file(fixtures_dir() + "/ground.epddl");
    ProblemDecl p = parse_problem_file(fixtures_dir() + "/ground-p1.epddl", d);
    GroundOptions opts;
    opts.max_ground_actions = 5;
    CHECK_THROWS_WITH_AS(ground(d, p, opts), doctest::Contains("cap"), EplanError);
}

TEST_CASE("initial state: common-whether collapses uncertainty per agent") {
    DomainDecl d = parse_domain(kTinyDomain, "<test>");
    PlanningTask task = ground(
        d, tiny_problem(d, "(p) (common-whether a (p)) (common-whether b (p))"));
    PointedKripke s = build_initial_state(task);
    FormulaId p = task.store.atom(*task.vocab.find_fluent("p"));
    for (AgentId i = 0; i < 2; ++i) {
        CHECK(entails(s, task.store, task.store.believes(i, p)));
        CHECK(entails(s, task.store,
                      task.store.common({0, 1},
                                        task.store.disjunction(
                                            task.store.believes(i, p),
                                            task.store.believes(i, task.store.negation(p))))));
    }
}

TEST_CASE("initial state: an unconstrained fluent is commonly unknown") {
    DomainDecl d = parse_domain(kTinyDomain, "<test>");
    PlanningTask task = ground(d, tiny_problem(d, "(p)", "(and (p) (q))"));
    std::vector<std::string> diagnostics;
    PointedKripke s = build_initial_state(task, &diagnostics);
    CHECK(s.structure->num_worlds() == 4);  // p and q free
    FormulaId p = task.store.atom(*task.vocab.find_fluent("p"));
    FormulaId ignorance = task.store.common(
        {0, 1}, task.store.conjunction(
                    task.store.negation(task.store.believes(0, p)),
                    task.store.negation(task.store.believes(0, task.store.negation(p)))));
    CHECK(entails(s, task.store, ignorance));
    // q was never mentioned in a literal
    REQUIRE(diagnostics.size() == 1);
    CHECK(diagnostics[0].find("q") != std::string::npos);
}

TEST_CASE("initial state: contradictions are reported") {
    DomainDecl d = parse_domain(kTinyDomain, "<test>");
    CHECK_THROWS_WITH_AS(ground(d, tiny_problem(d, "(p) (not (p))")),
                         doctest::Contains("contradictory"), ParseError);
    PlanningTask task = ground(d, tiny_problem(d, "(p) (common (not (p)))"));
    CHECK_THROWS_WITH_AS(build_initial_state(task), doctest::Contains("contradict"),
                         EplanError);
}

TEST_CASE("initial statements must stay propositional") {
    DomainDecl d = parse_domain(kTinyDomain, "<test>");
    CHECK_THROWS_WITH_AS(ground(d, tiny_problem(d, "(common (b a (p)))")),
                         doctest::Contains("fluent formula"), ParseError);
}

TEST_CASE("initial state entailments follow the statement shapes") {
    DomainDecl d = parse_domain(kTinyDomain, "<test>");
    PlanningTask task =
        ground(d, tiny_problem(d, "(p) (common (imply (q) (p))) (common-belief a (q))"));
    PointedKripke s = build_initial_state(task);
    FormulaStore& st = task.store;
    FormulaId p = st.atom(*task.vocab.find_fluent("p"));
    FormulaId q = st.atom(*task.vocab.find_fluent("q"));
    AgentSet everyone{0, 1};
    CHECK(entails(s, st, p));
    CHECK(entails(s, st, st.common(everyone, st.implication(q, p))));
    CHECK(entails(s, st, st.common(everyone, st.believes(0, q))));
}

TEST_CASE("parsed files round-trip through the pretty-printer") {
    for (const char* name : {"/coin.epddl", "/custom.epddl", "/lamp.epddl"}) {
        DomainDecl d1 = parse_domain_file(domains_dir() + name);
        std::string s1 = print_domain(d1);
        DomainDecl d2 = parse_domain(s1, "<reprint>");
        CHECK(print_domain(d2) == s1);
    }
    DomainDecl coin = parse_domain_file(domains_dir() + "/coin.epddl");
    for (const char* name : {"/coin-p1.epddl", "/coin-p2.epddl"}) {
        ProblemDecl p1 = parse_problem_file(domains_dir() + name, coin);
        std::string s1 = print_problem(p1);
        ProblemDecl p2 = parse_problem(s1, "<reprint>", coin);
        CHECK(print_problem(p2) == s1);
    }
}

TEST_CASE("custom update models ground with per-agent and catch-all rows") {
    DomainDecl d = parse_domain_file(domains_dir() + "/custom.epddl");
    ProblemDecl p = parse_problem_file(domains_dir() + "/custom-p1.epddl", d);
    PlanningTask task = ground(d, p);
    REQUIRE(task.actions.size() == 3);
    const auto& split = std::get<UpdateModel>(task.actions[2].op);
    CHECK(split.num_events == 2);
    AgentId a = *task.vocab.find_agent("a"), b = *task.vocab.find_agent("b");
    CHECK(split.relations[a] ==
          std::vector<std::pair<EventId, EventId>>{{0, 0}, {1, 1}});
    CHECK(split.relations[b].size() == 4);  // catch-all row
}

TEST_CASE("a problem may leave :init empty") {
    DomainDecl d = parse_domain(kTinyDomain, "<test>");
    PlanningTask task = ground(d, tiny_problem(d, ""));
    PointedKripke s = build_initial_state(task);
    CHECK(s.structure->num_worlds() == 2);  // p free, q unmentioned
    CHECK_FALSE(entails(s, task.store, task.goal));
}

TEST_CASE("mutated inputs either parse or fail with a reported location") {
    std::string base;
    {
        std::ifstream in(domains_dir() + "/coin.epddl");
        std::stringstream buf;
        buf << in.rdbuf();
        base = buf.str();
    }
    std::mt19937_64 rng(24680);
    int parsed = 0, rejected = 0;
    for (int i = 0; i < 300; ++i) {
        std::string text = base;
        switch (rng() % 4) {
            case 0:  // truncate
                text.resize(rng() % text.size());
                break;
            case 1:  // drop one character
                text.erase(rng() % text.size(), 1);
                break;
            case 2:  // flip a character
                text[rng() % text.size()] = static_cast<char>("()ab:?;x"[rng() % 8]);
                break;
            case 3:  // duplicate a slice
                text += text.substr(rng() % text.size());
                break;
        }
        try {
            parse_domain(text, "<fuzz>");
            ++parsed;
        } catch (const EplanError&) {
            ++rejected;  // includes ParseError; anything else would escape
        }
    }
    CHECK(parsed + rejected == 300);
    CHECK(rejected > 0);
}

TEST_CASE("problems referencing the wrong domain are rejected") {
    DomainDecl d = parse_domain(kTinyDomain, "<test>");
    CHECK_THROWS_AS(
        parse_problem("(define (problem x) (:domain other) (:init) (:goal (p)))", "<t>", d),
        ParseError);
}
