#include "eplan/formula.hpp"

#include <algorithm>
#include <cassert>

#include "eplan/errors.hpp"

namespace eplan {

namespace {

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::size_t FormulaNodeHash::operator()(const FormulaNode& n) const noexcept {
    std::size_t h = static_cast<std::size_t>(n.kind);
    h = hash_mix(h, n.fluent);
    h = hash_mix(h, n.agent);
    h = hash_mix(h, n.lhs);
    h = hash_mix(h, n.rhs);
    for (AgentId a : n.group) h = hash_mix(h, a);
    return h;
}

FormulaStore::FormulaStore() {
    FormulaNode truth_node;
    truth_node.kind = FormulaKind::True;
    intern(std::move(truth_node));
    FormulaNode falsum_node;
    falsum_node.kind = FormulaKind::False;
    intern(std::move(falsum_node));
}

FormulaId FormulaStore::intern(FormulaNode n) {
    auto it = index_.find(n);
    if (it != index_.end()) return it->second;
    auto id = static_cast<FormulaId>(nodes_.size());
    index_.emplace(n, id);
    nodes_.push_back(std::move(n));
    return id;
}

FormulaId FormulaStore::atom(FluentId f) {
    FormulaNode n;
    n.kind = FormulaKind::Atom;
    n.fluent = f;
    return intern(std::move(n));
}

FormulaId FormulaStore::negation(FormulaId f) {
    FormulaNode n;
    n.kind = FormulaKind::Not;
    n.lhs = f;
    return intern(std::move(n));
}

FormulaId FormulaStore::conjunction(FormulaId a, FormulaId b) {
    FormulaNode n;
    n.kind = FormulaKind::And;
    n.lhs = a;
    n.rhs = b;
    return intern(std::move(n));
}

FormulaId FormulaStore::disjunction(FormulaId a, FormulaId b) {
    FormulaNode n;
    n.kind = FormulaKind::Or;
    n.lhs = a;
    n.rhs = b;
    return intern(std::move(n));
}

FormulaId FormulaStore::implication(FormulaId a, FormulaId b) {
    FormulaNode n;
    n.kind = FormulaKind::Implies;
    n.lhs = a;
    n.rhs = b;
    return intern(std::move(n));
}

FormulaId FormulaStore::believes(AgentId agent, FormulaId f) {
    FormulaNode n;
    n.kind = FormulaKind::Believes;
    n.agent = agent;
    n.lhs = f;
    return intern(std::move(n));
}

FormulaId FormulaStore::everyone(AgentSet group, FormulaId f) {
    if (group.empty()) throw EplanError("E operator requires a nonempty agent group");
    FormulaNode n;
    n.kind = FormulaKind::Everyone;
    n.group = make_agent_set(std::move(group));
    n.lhs = f;
    return intern(std::move(n));
}

FormulaId FormulaStore::common(AgentSet group, FormulaId f) {
    if (group.empty()) throw EplanError("C operator requires a nonempty agent group");
    FormulaNode n;
    n.kind = FormulaKind::Common;
    n.group = make_agent_set(std::move(group));
    n.lhs = f;
    return intern(std::move(n));
}

FormulaId FormulaStore::conjoin(const std::vector<FormulaId>& fs) {
    if (fs.empty()) throw EplanError("cannot conjoin an empty list");
    FormulaId acc = fs.back();
    for (std::size_t i = fs.size() - 1; i-- > 0;) acc = conjunction(fs[i], acc);
    return acc;
}

FormulaId FormulaStore::disjoin(const std::vector<FormulaId>& fs) {
    if (fs.empty()) throw EplanError("cannot disjoin an empty list");
    FormulaId acc = fs.back();
    for (std::size_t i = fs.size() - 1; i-- > 0;) acc = disjunction(fs[i], acc);
    return acc;
}

// ── Structural utilities ────────────────────────────────────────────────────

bool is_fluent_formula(const FormulaStore& store, FormulaId f) {
    const FormulaNode& n = store.node(f);
    switch (n.kind) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Atom:
            return true;
        case FormulaKind::Not:
            return is_fluent_formula(store, n.lhs);
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
            return is_fluent_formula(store, n.lhs) && is_fluent_formula(store, n.rhs);
        case FormulaKind::Believes:
        case FormulaKind::Everyone:
        case FormulaKind::Common:
            return false;
    }
    return false;
}

unsigned modal_depth(const FormulaStore& store, FormulaId f) {
    const FormulaNode& n = store.node(f);
    switch (n.kind) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Atom:
            return 0;
        case FormulaKind::Not:
            return modal_depth(store, n.lhs);
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
            return std::max(modal_depth(store, n.lhs), modal_depth(store, n.rhs));
        case FormulaKind::Believes:
        case FormulaKind::Everyone:
        case FormulaKind::Common:
            return 1 + modal_depth(store, n.lhs);
    }
    return 0;
}

void collect_fluents(const FormulaStore& store, FormulaId f, std::set<FluentId>& out) {
    const FormulaNode& n = store.node(f);
    if (n.kind == FormulaKind::Atom) out.insert(n.fluent);
    if (n.lhs != kNoFormula) collect_fluents(store, n.lhs, out);
    if (n.rhs != kNoFormula) collect_fluents(store, n.rhs, out);
}

void collect_agents(const FormulaStore& store, FormulaId f, std::set<AgentId>& out) {
    const FormulaNode& n = store.node(f);
    if (n.kind == FormulaKind::Believes) out.insert(n.agent);
    out.insert(n.group.begin(), n.group.end());
    if (n.lhs != kNoFormula) collect_agents(store, n.lhs, out);
    if (n.rhs != kNoFormula) collect_agents(store, n.rhs, out);
}

void check_signature(const FormulaStore& store, FormulaId f, std::size_t num_fluents,
                     std::size_t num_agents) {
    std::set<FluentId> fluents;
    std::set<AgentId> agents;
    collect_fluents(store, f, fluents);
    collect_agents(store, f, agents);
    if (!fluents.empty() && *fluents.rbegin() >= num_fluents)
        throw EplanError("formula references fluent #" + std::to_string(*fluents.rbegin()) +
                         " outside the structure's signature of " + std::to_string(num_fluents) +
                         " fluents");
    if (!agents.empty() && *agents.rbegin() >= num_agents)
        throw EplanError("formula references agent #" + std::to_string(*agents.rbegin()) +
                         " outside the structure's signature of " + std::to_string(num_agents) +
                         " agents");
}

std::vector<FormulaId> top_level_conjuncts(const FormulaStore& store, FormulaId f) {
    std::vector<FormulaId> out;
    std::vector<FormulaId> stack{f};
    while (!stack.empty()) {
        FormulaId cur = stack.back();
        stack.pop_back();
        const FormulaNode& n = store.node(cur);
        if (n.kind == FormulaKind::And) {
            stack.push_back(n.rhs);  // lhs popped first keeps source order
            stack.push_back(n.lhs);
        } else {
            out.push_back(cur);
        }
    }
    return out;
}

bool eval_fluent_formula(const FormulaStore& store, FormulaId f,
                         const std::vector<bool>& valuation) {
    const FormulaNode& n = store.node(f);
    switch (n.kind) {
        case FormulaKind::True:
            return true;
        case FormulaKind::False:
            return false;
        case FormulaKind::Atom:
            if (n.fluent >= valuation.size())
                throw EplanError("fluent #" + std::to_string(n.fluent) + " outside valuation");
            return valuation[n.fluent];
        case FormulaKind::Not:
            return !eval_fluent_formula(store, n.lhs, valuation);
        case FormulaKind::And:
            return eval_fluent_formula(store, n.lhs, valuation) &&
                   eval_fluent_formula(store, n.rhs, valuation);
        case FormulaKind::Or:
            return eval_fluent_formula(store, n.lhs, valuation) ||
                   eval_fluent_formula(store, n.rhs, valuation);
        case FormulaKind::Implies:
            return !eval_fluent_formula(store, n.lhs, valuation) ||
                   eval_fluent_formula(store, n.rhs, valuation);
        case FormulaKind::Believes:
        case FormulaKind::Everyone:
        case FormulaKind::Common:
            throw EplanError("modal operator in a context that requires a fluent formula");
    }
    return false;
}

// ── Parsing ─────────────────────────────────────────────────────────────────

namespace {

AgentSet parse_group(const SExpr& e, FormulaStore&, const AgentResolver& agent) {
    if (!e.is_list())
        throw ParseError(e.loc, "expected a parenthesized agent group");
    if (e.items.empty()) throw ParseError(e.loc, "agent group must be nonempty");
    std::vector<AgentId> ids;
    ids.reserve(e.items.size());
    for (const SExpr& item : e.items) ids.push_back(agent(item));
    return make_agent_set(std::move(ids));
}

}  // namespace

FormulaId formula_from_sexpr(const SExpr& e, FormulaStore& store, const AtomResolver& atom,
                             const AgentResolver& agent) {
    if (e.is_symbol()) {
        if (e.text == "true") return store.truth();
        if (e.text == "false") return store.falsum();
        return atom(e);
    }
    if (e.items.empty()) throw ParseError(e.loc, "empty expression in formula");
    std::string_view head = e.head();
    auto rec = [&](const SExpr& sub) { return formula_from_sexpr(sub, store, atom, agent); };

    if (head == "not") {
        if (e.size() != 2) throw ParseError(e.loc, "not takes exactly one argument");
        return store.negation(rec(e.items[1]));
    }
    if (head == "and" || head == "or") {
        if (e.size() < 2)
            throw ParseError(e.loc, std::string(head) + " requires at least one argument");
        std::vector<FormulaId> parts;
        for (std::size_t i = 1; i < e.size(); ++i) parts.push_back(rec(e.items[i]));
        return head == "and" ? store.conjoin(parts) : store.disjoin(parts);
    }
    if (head == "imply") {
        if (e.size() != 3) throw ParseError(e.loc, "imply takes exactly two arguments");
        return store.implication(rec(e.items[1]), rec(e.items[2]));
    }
    if (head == "b") {
        if (e.size() != 3) throw ParseError(e.loc, "B takes an agent and a formula");
        return store.believes(agent(e.items[1]), rec(e.items[2]));
    }
    if (head == "e" || head == "c") {
        if (e.size() != 3)
            throw ParseError(e.loc, std::string(head == "e" ? "E" : "C") +
                                        " takes an agent group and a formula");
        AgentSet group = parse_group(e.items[1], store, agent);
        FormulaId body = rec(e.items[2]);
        return head == "e" ? store.everyone(std::move(group), body)
                           : store.common(std::move(group), body);
    }
    if (head == "true" || head == "false" || head == "when")
        throw ParseError(e.loc, "'" + std::string(head) + "' cannot head a formula application");
    return atom(e);
}

FormulaId parse_formula(std::string_view text, const Vocabulary& vocab, FormulaStore& store) {
    SExpr e = parse_single_sexpr(text, "<formula>");
    AtomResolver atom = [&](const SExpr& a) -> FormulaId {
        if (!a.is_symbol())
            throw ParseError(a.loc, "expected a fluent symbol, got a list");
        auto f = vocab.find_fluent(a.text);
        if (!f) throw ParseError(a.loc, "unknown fluent '" + a.text + "'");
        return store.atom(*f);
    };
    AgentResolver agent = [&](const SExpr& a) -> AgentId {
        if (!a.is_symbol()) throw ParseError(a.loc, "expected an agent name");
        auto id = vocab.find_agent(a.text);
        if (!id) throw ParseError(a.loc, "unknown agent '" + a.text + "'");
        return *id;
    };
    return formula_from_sexpr(e, store, atom, agent);
}

std::string print_formula(const FormulaStore& store, const Vocabulary& vocab, FormulaId f) {
    const FormulaNode& n = store.node(f);
    auto rec = [&](FormulaId sub) { return print_formula(store, vocab, sub); };
    auto group_text = [&](const AgentSet& g) {
        std::string out = "(";
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (i > 0) out += ' ';
            out += vocab.agent_name(g[i]);
        }
        return out + ")";
    };
    switch (n.kind) {
        case FormulaKind::True:
            return "true";
        case FormulaKind::False:
            return "false";
        case FormulaKind::Atom:
            return vocab.fluent_name(n.fluent);
        case FormulaKind::Not:
            return "(not " + rec(n.lhs) + ")";
        case FormulaKind::And:
            return "(and " + rec(n.lhs) + " " + rec(n.rhs) + ")";
        case FormulaKind::Or:
            return "(or " + rec(n.lhs) + " " + rec(n.rhs) + ")";
        case FormulaKind::Implies:
            return "(imply " + rec(n.lhs) + " " + rec(n.rhs) + ")";
        case FormulaKind::Believes:
            return "(B " + vocab.agent_name(n.agent) + " " + rec(n.lhs) + ")";
        case FormulaKind::Everyone:
            return "(E " + group_text(n.group) + " " + rec(n.lhs) + ")";
        case FormulaKind::Common:
            return "(C " + group_text(n.group) + " " + rec(n.lhs) + ")";
    }
    return "";
}

}  // namespace eplan
