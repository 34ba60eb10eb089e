#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "eplan/sexpr.hpp"
#include "eplan/vocabulary.hpp"

namespace eplan {

// ── Belief formulae ─────────────────────────────────────────────────────────
//
// Formulae are stored as an interned DAG: structurally identical subformulae
// share one FormulaId, which makes equality O(1) and lets evaluators memoize
// on (world, id) pairs. A FormulaStore owns the nodes; ids are indices into
// it. Stores are append-only: built during parsing, shareable for reads.

using FormulaId = std::uint32_t;
inline constexpr FormulaId kNoFormula = static_cast<FormulaId>(-1);

enum class FormulaKind : std::uint8_t {
    True,
    False,
    Atom,      // fluent
    Not,       // lhs
    And,       // lhs, rhs
    Or,        // lhs, rhs
    Implies,   // lhs, rhs
    Believes,  // agent, lhs      — single-agent modal operator
    Everyone,  // group, lhs      — everybody in the group believes
    Common,    // group, lhs      — common knowledge/belief of the group
};

struct FormulaNode {
    FormulaKind kind = FormulaKind::True;
    FluentId fluent = 0;  // Atom
    AgentId agent = 0;    // Believes
    FormulaId lhs = kNoFormula;
    FormulaId rhs = kNoFormula;
    AgentSet group;  // Everyone/Common; sorted, nonempty

    bool operator==(const FormulaNode&) const = default;
};

struct FormulaNodeHash {
    std::size_t operator()(const FormulaNode& n) const noexcept;
};

class FormulaStore {
public:
    FormulaStore();

    FormulaId truth() const { return 0; }
    FormulaId falsum() const { return 1; }
    FormulaId atom(FluentId f);
    FormulaId negation(FormulaId f);
    FormulaId conjunction(FormulaId a, FormulaId b);
    FormulaId disjunction(FormulaId a, FormulaId b);
    FormulaId implication(FormulaId a, FormulaId b);
    FormulaId believes(AgentId agent, FormulaId f);
    FormulaId everyone(AgentSet group, FormulaId f);
    FormulaId common(AgentSet group, FormulaId f);

    // Right-fold of a nonempty list: (and a b c) -> And(a, And(b, c)).
    FormulaId conjoin(const std::vector<FormulaId>& fs);
    FormulaId disjoin(const std::vector<FormulaId>& fs);

    const FormulaNode& node(FormulaId id) const { return nodes_[id]; }
    std::size_t size() const noexcept { return nodes_.size(); }

private:
    FormulaId intern(FormulaNode n);

    std::vector<FormulaNode> nodes_;
    std::unordered_map<FormulaNode, FormulaId, FormulaNodeHash> index_;
};

// ── Structural utilities ────────────────────────────────────────────────────

// True iff the formula contains no modal operator (Believes/Everyone/Common).
bool is_fluent_formula(const FormulaStore& store, FormulaId f);

// Nesting depth of modal operators; 0 for fluent formulae.
unsigned modal_depth(const FormulaStore& store, FormulaId f);

// Fluent atoms / agents occurring in a formula.
void collect_fluents(const FormulaStore& store, FormulaId f, std::set<FluentId>& out);
void collect_agents(const FormulaStore& store, FormulaId f, std::set<AgentId>& out);

// Throws EplanError when the formula references a fluent or agent outside the
// given signature sizes.
void check_signature(const FormulaStore& store, FormulaId f, std::size_t num_fluents,
                     std::size_t num_agents);

// Splits nested conjunctions into their top-level conjuncts; any other
// formula is its own single conjunct.
std::vector<FormulaId> top_level_conjuncts(const FormulaStore& store, FormulaId f);

// Evaluates a fluent formula against a plain valuation (bit per FluentId).
// Throws EplanError if a modal operator occurs.
bool eval_fluent_formula(const FormulaStore& store, FormulaId f, const std::vector<bool>& valuation);

// ── Concrete syntax ─────────────────────────────────────────────────────────
//
//   formula := atom | "true" | "false"
//            | (not F) | (and F+) | (or F+) | (imply F F)
//            | (B agent F) | (E (agent+) F) | (C (agent+) F)
//
// n-ary and/or are right-folded into the binary AST. Symbols are
// case-insensitive, and every fluent/agent must already be declared in the
// vocabulary.

FormulaId parse_formula(std::string_view text, const Vocabulary& vocab, FormulaStore& store);

// Same grammar over an already-read s-expression. The two callbacks decide
// what counts as an atom and how agent terms resolve, which lets the action
// language reuse the operator layer with predicate applications as atoms.
using AtomResolver = std::function<FormulaId(const SExpr&)>;
using AgentResolver = std::function<AgentId(const SExpr&)>;

FormulaId formula_from_sexpr(const SExpr& e, FormulaStore& store, const AtomResolver& atom,
                             const AgentResolver& agent);

// Prints the canonical binary form; parse(print(f)) == f.
std::string print_formula(const FormulaStore& store, const Vocabulary& vocab, FormulaId f);

}  // namespace eplan
