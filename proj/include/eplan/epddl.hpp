#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "eplan/formula.hpp"
#include "eplan/kripke.hpp"
#include "eplan/sexpr.hpp"
#include "eplan/update.hpp"
#include "eplan/vocabulary.hpp"

namespace eplan::epddl {

// ── Declarations (parsed, not yet ground) ───────────────────────────────────
//
// The input language is a PDDL-flavored pair of files. Formula-shaped fields
// stay as raw s-expressions until grounding binds the parameters.
//
//   (define (domain NAME)
//     (:epddl 0.1)
//     (:types t1 t2)                       ; "agent" is built in
//     (:agents a b c)
//     (:predicates (pred ?x - t1) ...)
//     (:action NAME :act-type ontic|sensing|announcement
//              :parameters (?x - t1 ...) :precondition F :effect E
//              :observers (TERM ...) :p-observers (TERM ...))
//     (:update-model NAME :parameters (...) :events (e1 e2) :designated e1
//              :pre ((e1 F) ...) :post ((e1 ((pred ...) F) ...) ...)
//              :accessibility ((TERM (e1 e2) ...) ...)))
//
// Observer terms are an agent name, a parameter, or (when F term). An
// accessibility row headed by an unbound variable applies to every agent
// without an explicit row of its own.

struct TypedVar {
    std::string name;  // includes the leading '?'
    std::string type;
    SourceLoc loc;
};

struct PredicateDecl {
    std::string name;
    std::vector<std::string> param_types;
    SourceLoc loc;
};

struct ObsTermDecl {
    SExpr term;                 // symbol: agent name or ?parameter
    std::optional<SExpr> guard;
};

struct ActionDecl {
    std::string name;
    ActionKind kind = ActionKind::Ontic;
    std::vector<TypedVar> params;
    std::optional<SExpr> precondition;  // default: true
    SExpr effect;
    std::vector<ObsTermDecl> observers;
    std::vector<ObsTermDecl> p_observers;
    SourceLoc loc;
};

struct UpdateModelDecl {
    std::string name;
    std::vector<TypedVar> params;
    std::vector<std::string> events;
    std::string designated;
    std::vector<std::pair<std::string, SExpr>> pre;  // event name -> formula
    std::vector<std::pair<std::string, std::vector<std::pair<SExpr, SExpr>>>> post;
    std::vector<std::pair<SExpr, std::vector<std::pair<std::string, std::string>>>> accessibility;
    SourceLoc loc;
};

struct DomainDecl {
    std::string name;
    std::string version;  // (:epddl X) tag, "" when absent
    std::vector<std::string> types;
    std::vector<std::string> agents;
    std::vector<PredicateDecl> predicates;
    std::vector<ActionDecl> actions;
    std::vector<UpdateModelDecl> update_models;
};

enum class InitKind { Literal, CommonFluent, CommonBelief, CommonWhether };

struct InitDecl {
    InitKind kind = InitKind::Literal;
    SExpr payload;            // literal or formula
    std::string agent;        // CommonBelief/CommonWhether
    SourceLoc loc;
};

struct ProblemDecl {
    std::string name;
    std::string domain;
    std::vector<std::pair<std::string, std::string>> objects;  // name, type
    std::vector<InitDecl> init;
    SExpr goal;
};

DomainDecl parse_domain(std::string_view text, std::string filename);
ProblemDecl parse_problem(std::string_view text, std::string filename, const DomainDecl& domain);

DomainDecl parse_domain_file(const std::string& path);
ProblemDecl parse_problem_file(const std::string& path, const DomainDecl& domain);

// Re-emit a declaration as parseable text; parse(print(d)) prints the same
// bytes again.
std::string print_domain(const DomainDecl& d);
std::string print_problem(const ProblemDecl& p);

// ── Ground task ─────────────────────────────────────────────────────────────

struct GroundAction {
    std::string name;  // schema name + "_"-joined bound objects
    std::variant<ActionSpec, UpdateModel> op;

    bool is_classical() const noexcept { return std::holds_alternative<ActionSpec>(op); }
};

// Everything the planner needs: the interned signature and formulas, the
// ground action list in deterministic (schema, binding) order, the goal, and
// the initial-state statements.
struct PlanningTask {
    Vocabulary vocab;
    FormulaStore store;
    std::vector<GroundAction> actions;
    FormulaId goal = kNoFormula;

    std::vector<std::pair<FluentId, bool>> init_literals;
    std::vector<FormulaId> init_common;                          // fluent formulas
    std::vector<std::pair<AgentId, FormulaId>> init_belief;      // agent believes ff
    std::vector<std::pair<AgentId, FormulaId>> init_whether;     // agent knows whether ff

    // Fluents mentioned in init/preconditions/effects/goal: the worlds of the
    // initial state range over exactly these; everything else starts false
    // everywhere.
    std::vector<FluentId> world_fluents;
};

struct GroundOptions {
    std::size_t max_ground_actions = 100000;
};

PlanningTask ground(const DomainDecl& domain, const ProblemDecl& problem,
                    const GroundOptions& options = {});

// Builds the initial e-state. Worlds are all valuations of the task's world
// fluents satisfying every `common` statement; the designated world makes
// exactly the positive init literals true; agent relations keep the target
// worlds compatible with that agent's `common-belief` statements and, for
// each `common-whether` statement, agreeing with the source world. Fluents
// left unmentioned by literals are reported through `diagnostics`.
PointedKripke build_initial_state(const PlanningTask& task,
                                  std::vector<std::string>* diagnostics = nullptr);

}  // namespace eplan::epddl
