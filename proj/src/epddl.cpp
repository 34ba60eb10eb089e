#include "eplan/epddl.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace eplan::epddl {

namespace {

const std::set<std::string> kReservedNames = {
    "and", "or",   "not",    "imply",         "b",    "e",
    "c",   "true", "false",  "when",          "common", "common-belief",
    "common-whether"};

bool is_variable(const std::string& s) { return !s.empty() && s[0] == '?'; }

void expect_symbol(const SExpr& e, const char* what) {
    if (!e.is_symbol()) throw ParseError(e.loc, std::string("expected ") + what);
}

// PDDL-style typed list: ?x ?y - type1 ?z - type2. Every name must receive
// an explicit type.
std::vector<TypedVar> parse_typed_list(const SExpr& list, bool variables) {
    std::vector<TypedVar> out;
    std::vector<TypedVar> pending;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const SExpr& item = list.items[i];
        expect_symbol(item, variables ? "a parameter name" : "an object name");
        if (item.text == "-") {
            if (pending.empty()) throw ParseError(item.loc, "dangling '-' in typed list");
            if (++i >= list.size()) throw ParseError(item.loc, "missing type after '-'");
            expect_symbol(list.items[i], "a type name");
            for (auto& v : pending) {
                v.type = list.items[i].text;
                out.push_back(std::move(v));
            }
            pending.clear();
            continue;
        }
        if (variables != is_variable(item.text))
            throw ParseError(item.loc, variables ? "parameters must start with '?'"
                                                 : "object names cannot start with '?'");
        pending.push_back(TypedVar{item.text, "", item.loc});
    }
    if (!pending.empty())
        throw ParseError(pending.front().loc,
                         "'" + pending.front().name + "' is missing a type annotation");
    return out;
}

// Keyword/value scan over the tail of an :action or :update-model block.
std::vector<std::pair<std::string, const SExpr*>> keyword_pairs(const SExpr& block,
                                                                std::size_t start) {
    std::vector<std::pair<std::string, const SExpr*>> out;
    for (std::size_t i = start; i < block.size(); i += 2) {
        const SExpr& key = block.items[i];
        if (!key.is_symbol() || key.text.empty() || key.text[0] != ':')
            throw ParseError(key.loc, "expected a :keyword");
        if (i + 1 >= block.size())
            throw ParseError(key.loc, "keyword " + key.text + " is missing a value");
        out.push_back({key.text, &block.items[i + 1]});
    }
    return out;
}

std::vector<ObsTermDecl> parse_obs_list(const SExpr& list) {
    if (!list.is_list()) throw ParseError(list.loc, "observer list must be parenthesized");
    std::vector<ObsTermDecl> out;
    for (const SExpr& item : list.items) {
        if (item.is_symbol()) {
            out.push_back(ObsTermDecl{item, std::nullopt});
        } else if (item.head() == "when") {
            if (item.size() != 3)
                throw ParseError(item.loc, "guarded observer is (when F agent-term)");
            if (!item.items[2].is_symbol())
                throw ParseError(item.items[2].loc, "expected an agent term");
            out.push_back(ObsTermDecl{item.items[2], item.items[1]});
        } else {
            throw ParseError(item.loc, "observer must be an agent term or (when F term)");
        }
    }
    return out;
}

ActionKind parse_act_type(const SExpr& e) {
    const SExpr* sym = &e;
    if (e.is_list()) {
        if (e.size() != 1) throw ParseError(e.loc, "malformed :act-type");
        sym = &e.items[0];
    }
    expect_symbol(*sym, "an action type");
    if (sym->text == "ontic") return ActionKind::Ontic;
    if (sym->text == "sensing") return ActionKind::Sensing;
    if (sym->text == "announcement") return ActionKind::Announcement;
    throw ParseError(sym->loc, "unknown action type '" + sym->text +
                                   "' (expected ontic, sensing, or announcement)");
}

ActionDecl parse_action(const SExpr& block) {
    if (block.size() < 2 || !block.items[1].is_symbol())
        throw ParseError(block.loc, ":action requires a name");
    ActionDecl a;
    a.name = block.items[1].text;
    a.loc = block.loc;
    bool have_type = false, have_effect = false;
    for (auto [key, value] : keyword_pairs(block, 2)) {
        if (key == ":act-type") {
            a.kind = parse_act_type(*value);
            have_type = true;
        } else if (key == ":parameters") {
            if (!value->is_list()) throw ParseError(value->loc, ":parameters must be a list");
            a.params = parse_typed_list(*value, true);
        } else if (key == ":precondition") {
            a.precondition = *value;
        } else if (key == ":effect") {
            a.effect = *value;
            have_effect = true;
        } else if (key == ":observers") {
            a.observers = parse_obs_list(*value);
        } else if (key == ":p-observers") {
            a.p_observers = parse_obs_list(*value);
        } else {
            throw ParseError(value->loc, "unknown action keyword " + key);
        }
    }
    if (!have_type) throw ParseError(block.loc, "action '" + a.name + "' is missing :act-type");
    if (!have_effect) throw ParseError(block.loc, "action '" + a.name + "' is missing :effect");
    return a;
}

UpdateModelDecl parse_update_model(const SExpr& block) {
    if (block.size() < 2 || !block.items[1].is_symbol())
        throw ParseError(block.loc, ":update-model requires a name");
    UpdateModelDecl u;
    u.name = block.items[1].text;
    u.loc = block.loc;
    for (auto [key, value] : keyword_pairs(block, 2)) {
        if (key == ":parameters") {
            if (!value->is_list()) throw ParseError(value->loc, ":parameters must be a list");
            u.params = parse_typed_list(*value, true);
        } else if (key == ":events") {
            if (!value->is_list() || value->items.empty())
                throw ParseError(value->loc, ":events must list at least one event");
            for (const SExpr& e : value->items) {
                expect_symbol(e, "an event name");
                u.events.push_back(e.text);
            }
        } else if (key == ":designated") {
            expect_symbol(*value, "an event name");
            u.designated = value->text;
        } else if (key == ":pre") {
            if (!value->is_list()) throw ParseError(value->loc, ":pre must be a list");
            for (const SExpr& entry : value->items) {
                if (!entry.is_list() || entry.size() != 2 || !entry.items[0].is_symbol())
                    throw ParseError(entry.loc, ":pre entry must be (event formula)");
                u.pre.push_back({entry.items[0].text, entry.items[1]});
            }
        } else if (key == ":post") {
            if (!value->is_list()) throw ParseError(value->loc, ":post must be a list");
            for (const SExpr& entry : value->items) {
                if (!entry.is_list() || entry.items.empty() || !entry.items[0].is_symbol())
                    throw ParseError(entry.loc, ":post entry must be (event (atom formula) ...)");
                std::vector<std::pair<SExpr, SExpr>> cells;
                for (std::size_t i = 1; i < entry.size(); ++i) {
                    const SExpr& cell = entry.items[i];
                    if (!cell.is_list() || cell.size() != 2)
                        throw ParseError(cell.loc, "post cell must be (atom formula)");
                    cells.push_back({cell.items[0], cell.items[1]});
                }
                u.post.push_back({entry.items[0].text, std::move(cells)});
            }
        } else if (key == ":accessibility") {
            if (!value->is_list()) throw ParseError(value->loc, ":accessibility must be a list");
            for (const SExpr& row : value->items) {
                if (!row.is_list() || row.items.empty() || !row.items[0].is_symbol())
                    throw ParseError(row.loc,
                                     "accessibility row must be (agent-term (e1 e2) ...)");
                std::vector<std::pair<std::string, std::string>> pairs;
                for (std::size_t i = 1; i < row.size(); ++i) {
                    const SExpr& pr = row.items[i];
                    if (!pr.is_list() || pr.size() != 2 || !pr.items[0].is_symbol() ||
                        !pr.items[1].is_symbol())
                        throw ParseError(pr.loc, "accessibility pair must be (event event)");
                    pairs.push_back({pr.items[0].text, pr.items[1].text});
                }
                u.accessibility.push_back({row.items[0], std::move(pairs)});
            }
        } else {
            throw ParseError(value->loc, "unknown update-model keyword " + key);
        }
    }
    if (u.events.empty())
        throw ParseError(block.loc, "update model '" + u.name + "' declares no events");
    if (u.designated.empty())
        throw ParseError(block.loc, "update model '" + u.name + "' is missing :designated");
    auto known = [&](const std::string& e) {
        return std::find(u.events.begin(), u.events.end(), e) != u.events.end();
    };
    if (!known(u.designated))
        throw ParseError(block.loc, "designated event '" + u.designated + "' is not declared");
    for (const auto& [event, formula] : u.pre)
        if (!known(event)) throw ParseError(block.loc, "unknown event '" + event + "' in :pre");
    for (const auto& [event, cells] : u.post)
        if (!known(event)) throw ParseError(block.loc, "unknown event '" + event + "' in :post");
    for (const auto& [term, pairs] : u.accessibility)
        for (const auto& [from, to] : pairs)
            if (!known(from) || !known(to))
                throw ParseError(block.loc, "unknown event in :accessibility of '" + u.name + "'");
    return u;
}

const SExpr& expect_define(const SExpr& top, const char* what) {
    if (!top.is_list() || top.size() < 2 || top.head() != "define")
        throw ParseError(top.loc, std::string("expected (define (") + what + " ...) ...)");
    const SExpr& header = top.items[1];
    if (!header.is_list() || header.size() != 2 || !header.items[0].is_symbol(what) ||
        !header.items[1].is_symbol())
        throw ParseError(top.loc, std::string("expected (") + what + " NAME) header");
    return header;
}

}  // namespace

DomainDecl parse_domain(std::string_view text, std::string filename) {
    std::vector<SExpr> top = parse_sexprs(text, std::move(filename));
    if (top.size() != 1)
        throw ParseError(top.empty() ? SourceLoc{} : top[1].loc,
                         "domain file must contain exactly one (define ...) form");
    const SExpr& def = top[0];
    const SExpr& header = expect_define(def, "domain");

    DomainDecl d;
    d.name = header.items[1].text;
    std::set<std::string> names;  // actions + update models share one namespace

    for (std::size_t i = 2; i < def.size(); ++i) {
        const SExpr& block = def.items[i];
        if (!block.is_list() || block.items.empty())
            throw ParseError(block.loc, "expected a (:keyword ...) block");
        std::string_view head = block.head();
        if (head == ":epddl") {
            if (block.size() != 2 || !block.items[1].is_symbol())
                throw ParseError(block.loc, ":epddl takes one version tag");
            d.version = block.items[1].text;
        } else if (head == ":types") {
            for (std::size_t j = 1; j < block.size(); ++j) {
                expect_symbol(block.items[j], "a type name");
                if (block.items[j].text == "agent")
                    throw ParseError(block.items[j].loc, "'agent' is a built-in type");
                d.types.push_back(block.items[j].text);
            }
        } else if (head == ":agents") {
            for (std::size_t j = 1; j < block.size(); ++j) {
                expect_symbol(block.items[j], "an agent name");
                d.agents.push_back(block.items[j].text);
            }
            if (d.agents.empty())
                throw ParseError(block.loc, "(:agents) must declare at least one agent");
        } else if (head == ":predicates") {
            for (std::size_t j = 1; j < block.size(); ++j) {
                const SExpr& p = block.items[j];
                if (!p.is_list() || p.items.empty() || !p.items[0].is_symbol())
                    throw ParseError(p.loc, "predicate declaration must be (name params...)");
                PredicateDecl decl;
                decl.name = p.items[0].text;
                decl.loc = p.loc;
                if (kReservedNames.count(decl.name))
                    throw ParseError(p.loc, "'" + decl.name + "' is a reserved name");
                SExpr params = p;
                params.items.erase(params.items.begin());
                for (const TypedVar& v : parse_typed_list(params, true))
                    decl.param_types.push_back(v.type);
                d.predicates.push_back(std::move(decl));
            }
        } else if (head == ":action") {
            ActionDecl a = parse_action(block);
            if (kReservedNames.count(a.name))
                throw ParseError(block.loc, "'" + a.name + "' is a reserved name");
            if (!names.insert(a.name).second)
                throw ParseError(block.loc, "duplicate action name '" + a.name + "'");
            d.actions.push_back(std::move(a));
        } else if (head == ":update-model") {
            UpdateModelDecl u = parse_update_model(block);
            if (!names.insert(u.name).second)
                throw ParseError(block.loc, "duplicate action name '" + u.name + "'");
            d.update_models.push_back(std::move(u));
        } else {
            throw ParseError(block.loc, "unknown domain block " + std::string(head));
        }
    }

    if (d.agents.empty()) throw ParseError(def.loc, "domain declares no agents");
    {
        std::set<std::string> seen;
        for (const auto& a : d.agents)
            if (!seen.insert(a).second)
                throw ParseError(def.loc, "duplicate agent '" + a + "'");
        seen.clear();
        for (const auto& t : d.types)
            if (!seen.insert(t).second)
                throw ParseError(def.loc, "duplicate type '" + t + "'");
        seen.clear();
        for (const auto& p : d.predicates)
            if (!seen.insert(p.name).second)
                throw ParseError(p.loc, "duplicate predicate '" + p.name + "'");
    }
    auto type_known = [&](const std::string& t) {
        return t == "agent" || std::find(d.types.begin(), d.types.end(), t) != d.types.end();
    };
    for (const auto& p : d.predicates)
        for (const auto& t : p.param_types)
            if (!type_known(t))
                throw ParseError(p.loc, "predicate '" + p.name + "' uses undeclared type '" + t + "'");
    for (const auto& a : d.actions)
        for (const auto& v : a.params)
            if (!type_known(v.type))
                throw ParseError(v.loc, "parameter '" + v.name + "' has undeclared type '" + v.type + "'");
    for (const auto& u : d.update_models)
        for (const auto& v : u.params)
            if (!type_known(v.type))
                throw ParseError(v.loc, "parameter '" + v.name + "' has undeclared type '" + v.type + "'");
    return d;
}

ProblemDecl parse_problem(std::string_view text, std::string filename, const DomainDecl& domain) {
    std::vector<SExpr> top = parse_sexprs(text, std::move(filename));
    if (top.size() != 1)
        throw ParseError(top.empty() ? SourceLoc{} : top[1].loc,
                         "problem file must contain exactly one (define ...) form");
    const SExpr& def = top[0];
    const SExpr& header = expect_define(def, "problem");

    ProblemDecl p;
    p.name = header.items[1].text;
    bool have_goal = false;

    for (std::size_t i = 2; i < def.size(); ++i) {
        const SExpr& block = def.items[i];
        if (!block.is_list() || block.items.empty())
            throw ParseError(block.loc, "expected a (:keyword ...) block");
        std::string_view head = block.head();
        if (head == ":domain") {
            if (block.size() != 2 || !block.items[1].is_symbol())
                throw ParseError(block.loc, ":domain takes one name");
            p.domain = block.items[1].text;
        } else if (head == ":objects") {
            SExpr rest = block;
            rest.items.erase(rest.items.begin());
            for (const TypedVar& v : parse_typed_list(rest, false)) {
                if (v.type == "agent")
                    throw ParseError(v.loc, "agents are declared in the domain, not :objects");
                p.objects.push_back({v.name, v.type});
            }
        } else if (head == ":init") {
            for (std::size_t j = 1; j < block.size(); ++j) {
                const SExpr& stmt = block.items[j];
                InitDecl decl;
                decl.loc = stmt.loc;
                std::string_view h = stmt.is_list() ? stmt.head() : std::string_view{};
                if (h == "common") {
                    if (stmt.size() != 2)
                        throw ParseError(stmt.loc, "(common F) takes one formula");
                    decl.kind = InitKind::CommonFluent;
                    decl.payload = stmt.items[1];
                } else if (h == "common-belief" || h == "common-whether") {
                    if (stmt.size() != 3 || !stmt.items[1].is_symbol())
                        throw ParseError(stmt.loc,
                                         "(" + std::string(h) + " agent F) takes an agent and a formula");
                    decl.kind = h == "common-belief" ? InitKind::CommonBelief : InitKind::CommonWhether;
                    decl.agent = stmt.items[1].text;
                    decl.payload = stmt.items[2];
                } else if (stmt.is_list() && (h == "not" || !kReservedNames.count(std::string(h)))) {
                    decl.kind = InitKind::Literal;
                    decl.payload = stmt;
                } else {
                    throw ParseError(stmt.loc,
                                     "unsupported initial statement (expected a literal, "
                                     "(common F), (common-belief ag F), or (common-whether ag F))");
                }
                p.init.push_back(std::move(decl));
            }
        } else if (head == ":goal") {
            if (block.size() != 2) throw ParseError(block.loc, ":goal takes one formula");
            p.goal = block.items[1];
            have_goal = true;
        } else {
            throw ParseError(block.loc, "unknown problem block " + std::string(head));
        }
    }

    if (p.domain.empty()) throw ParseError(def.loc, "problem is missing (:domain ...)");
    if (p.domain != domain.name)
        throw ParseError(def.loc, "problem targets domain '" + p.domain + "' but '" +
                                      domain.name + "' was loaded");
    if (!have_goal) throw ParseError(def.loc, "problem is missing (:goal ...)");
    std::set<std::string> seen(domain.agents.begin(), domain.agents.end());
    for (const auto& [name, type] : p.objects)
        if (!seen.insert(name).second)
            throw ParseError(def.loc, "object '" + name + "' clashes with another object or agent");
    auto type_known = [&](const std::string& t) {
        return std::find(domain.types.begin(), domain.types.end(), t) != domain.types.end();
    };
    for (const auto& [name, type] : p.objects)
        if (!type_known(type))
            throw ParseError(def.loc, "object '" + name + "' has undeclared type '" + type + "'");
    return p;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EplanError("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

DomainDecl parse_domain_file(const std::string& path) {
    return parse_domain(read_file(path), path);
}

ProblemDecl parse_problem_file(const std::string& path, const DomainDecl& domain) {
    return parse_problem(read_file(path), path, domain);
}

// ── Pretty-printing ─────────────────────────────────────────────────────────

namespace {

void print_typed_vars(std::ostringstream& out, const std::vector<TypedVar>& vars) {
    out << "(";
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i > 0) out << " ";
        out << vars[i].name << " - " << vars[i].type;
    }
    out << ")";
}

void print_obs_list(std::ostringstream& out, const char* key,
                    const std::vector<ObsTermDecl>& terms) {
    if (terms.empty()) return;
    out << " " << key << " (";
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i > 0) out << " ";
        if (terms[i].guard)
            out << "(when " << to_string(*terms[i].guard) << " " << to_string(terms[i].term) << ")";
        else
            out << to_string(terms[i].term);
    }
    out << ")";
}

}  // namespace

std::string print_domain(const DomainDecl& d) {
    std::ostringstream out;
    out << "(define (domain " << d.name << ")";
    if (!d.version.empty()) out << "\n  (:epddl " << d.version << ")";
    if (!d.types.empty()) {
        out << "\n  (:types";
        for (const auto& t : d.types) out << " " << t;
        out << ")";
    }
    out << "\n  (:agents";
    for (const auto& a : d.agents) out << " " << a;
    out << ")";
    if (!d.predicates.empty()) {
        out << "\n  (:predicates";
        for (const auto& p : d.predicates) {
            out << " (" << p.name;
            for (std::size_t i = 0; i < p.param_types.size(); ++i)
                out << " ?x" << i << " - " << p.param_types[i];
            out << ")";
        }
        out << ")";
    }
    for (const auto& a : d.actions) {
        out << "\n  (:action " << a.name << " :act-type ";
        out << (a.kind == ActionKind::Ontic      ? "ontic"
                : a.kind == ActionKind::Sensing  ? "sensing"
                                                 : "announcement");
        if (!a.params.empty()) {
            out << " :parameters ";
            print_typed_vars(out, a.params);
        }
        if (a.precondition) out << " :precondition " << to_string(*a.precondition);
        out << " :effect " << to_string(a.effect);
        print_obs_list(out, ":observers", a.observers);
        print_obs_list(out, ":p-observers", a.p_observers);
        out << ")";
    }
    for (const auto& u : d.update_models) {
        out << "\n  (:update-model " << u.name;
        if (!u.params.empty()) {
            out << " :parameters ";
            print_typed_vars(out, u.params);
        }
        out << " :events (";
        for (std::size_t i = 0; i < u.events.size(); ++i)
            out << (i > 0 ? " " : "") << u.events[i];
        out << ") :designated " << u.designated;
        if (!u.pre.empty()) {
            out << " :pre (";
            for (std::size_t i = 0; i < u.pre.size(); ++i)
                out << (i > 0 ? " " : "") << "(" << u.pre[i].first << " "
                    << to_string(u.pre[i].second) << ")";
            out << ")";
        }
        if (!u.post.empty()) {
            out << " :post (";
            for (std::size_t i = 0; i < u.post.size(); ++i) {
                out << (i > 0 ? " " : "") << "(" << u.post[i].first;
                for (const auto& [atom, formula] : u.post[i].second)
                    out << " (" << to_string(atom) << " " << to_string(formula) << ")";
                out << ")";
            }
            out << ")";
        }
        if (!u.accessibility.empty()) {
            out << " :accessibility (";
            for (std::size_t i = 0; i < u.accessibility.size(); ++i) {
                out << (i > 0 ? " " : "") << "(" << to_string(u.accessibility[i].first);
                for (const auto& [from, to] : u.accessibility[i].second)
                    out << " (" << from << " " << to << ")";
                out << ")";
            }
            out << ")";
        }
        out << ")";
    }
    out << ")\n";
    return out.str();
}

std::string print_problem(const ProblemDecl& p) {
    std::ostringstream out;
    out << "(define (problem " << p.name << ")";
    out << "\n  (:domain " << p.domain << ")";
    if (!p.objects.empty()) {
        out << "\n  (:objects";
        for (const auto& [name, type] : p.objects) out << " " << name << " - " << type;
        out << ")";
    }
    out << "\n  (:init";
    for (const auto& decl : p.init) {
        out << " ";
        switch (decl.kind) {
            case InitKind::Literal:
                out << to_string(decl.payload);
                break;
            case InitKind::CommonFluent:
                out << "(common " << to_string(decl.payload) << ")";
                break;
            case InitKind::CommonBelief:
                out << "(common-belief " << decl.agent << " " << to_string(decl.payload) << ")";
                break;
            case InitKind::CommonWhether:
                out << "(common-whether " << decl.agent << " " << to_string(decl.payload) << ")";
                break;
        }
    }
    out << ")";
    out << "\n  (:goal " << to_string(p.goal) << "))\n";
    return out.str();
}

// ── Grounding ───────────────────────────────────────────────────────────────

namespace {

using Bindings = std::map<std::string, std::string>;

class Grounder {
public:
    Grounder(const DomainDecl& domain, const ProblemDecl& problem, const GroundOptions& options)
        : domain_(domain), problem_(problem), options_(options) {
        for (const auto& agent : domain_.agents) {
            task_.vocab.add_agent(agent);
            object_type_[agent] = "agent";
            objects_by_type_["agent"].push_back(agent);
        }
        for (const auto& [name, type] : problem_.objects) {
            object_type_[name] = type;
            objects_by_type_[type].push_back(name);
        }
        for (const auto& pred : domain_.predicates) predicates_[pred.name] = &pred;
    }

    PlanningTask run() {
        ground_init();
        ground_goal();
        for (const auto& action : domain_.actions) ground_schema(action);
        for (const auto& model : domain_.update_models) ground_schema(model);
        task_.world_fluents.assign(world_fluents_.begin(), world_fluents_.end());
        std::set<std::string> names;
        for (const auto& ga : task_.actions)
            if (!names.insert(ga.name).second)
                throw EplanError("ground action name '" + ga.name + "' is ambiguous");
        return std::move(task_);
    }

private:
    // Object bound to a term: either a binding for ?var or the symbol itself.
    std::string term_value(const SExpr& term, const Bindings& bindings) const {
        expect_symbol(term, "an object term");
        if (is_variable(term.text)) {
            auto it = bindings.find(term.text);
            if (it == bindings.end())
                throw ParseError(term.loc, "unbound parameter '" + term.text + "'");
            return it->second;
        }
        return term.text;
    }

    FluentId ground_fluent(const SExpr& e, const Bindings& bindings, bool mention) {
        std::string pred_name;
        std::vector<const SExpr*> args;
        if (e.is_symbol()) {
            if (is_variable(e.text))
                throw ParseError(e.loc, "a parameter cannot stand for a fluent");
            pred_name = e.text;
        } else {
            if (e.items.empty() || !e.items[0].is_symbol())
                throw ParseError(e.loc, "malformed atom");
            pred_name = e.items[0].text;
            for (std::size_t i = 1; i < e.size(); ++i) args.push_back(&e.items[i]);
        }
        auto it = predicates_.find(pred_name);
        if (it == predicates_.end())
            throw ParseError(e.loc, "unknown predicate '" + pred_name + "'");
        const PredicateDecl& pred = *it->second;
        if (pred.param_types.size() != args.size())
            throw ParseError(e.loc, "predicate '" + pred_name + "' expects " +
                                        std::to_string(pred.param_types.size()) + " arguments, got " +
                                        std::to_string(args.size()));
        std::string name = pred_name;
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::string value = term_value(*args[i], bindings);
            auto ot = object_type_.find(value);
            if (ot == object_type_.end())
                throw ParseError(args[i]->loc, "unknown object '" + value + "'");
            if (ot->second != pred.param_types[i])
                throw ParseError(args[i]->loc, "argument '" + value + "' has type '" + ot->second +
                                                   "' but '" + pred_name + "' expects '" +
                                                   pred.param_types[i] + "'");
            name += "_" + value;
        }
        FluentId f = task_.vocab.add_fluent(name);
        if (mention) world_fluents_.insert(f);
        return f;
    }

    AgentId ground_agent(const SExpr& e, const Bindings& bindings) {
        std::string value = term_value(e, bindings);
        auto id = task_.vocab.find_agent(value);
        if (!id) throw ParseError(e.loc, "'" + value + "' is not a declared agent");
        return *id;
    }

    FormulaId ground_formula(const SExpr& e, const Bindings& bindings, bool mention) {
        AtomResolver atom = [&](const SExpr& a) {
            return task_.store.atom(ground_fluent(a, bindings, mention));
        };
        AgentResolver agent = [&](const SExpr& a) { return ground_agent(a, bindings); };
        return formula_from_sexpr(e, task_.store, atom, agent);
    }

    FormulaId ground_fluent_formula(const SExpr& e, const Bindings& bindings, const char* what) {
        FormulaId f = ground_formula(e, bindings, true);
        if (!is_fluent_formula(task_.store, f))
            throw ParseError(e.loc, std::string(what) + " must be a fluent formula");
        return f;
    }

    void ground_init() {
        std::map<FluentId, bool> literal_values;
        for (const InitDecl& decl : problem_.init) {
            switch (decl.kind) {
                case InitKind::Literal: {
                    const SExpr* atom = &decl.payload;
                    bool value = true;
                    if (decl.payload.head() == "not") {
                        if (decl.payload.size() != 2)
                            throw ParseError(decl.loc, "malformed init literal");
                        atom = &decl.payload.items[1];
                        value = false;
                    }
                    FluentId f = ground_fluent(*atom, {}, true);
                    auto [it, fresh] = literal_values.emplace(f, value);
                    if (!fresh && it->second != value)
                        throw ParseError(decl.loc, "contradictory init literals for '" +
                                                       task_.vocab.fluent_name(f) + "'");
                    if (fresh) task_.init_literals.push_back({f, value});
                    break;
                }
                case InitKind::CommonFluent:
                    task_.init_common.push_back(
                        ground_fluent_formula(decl.payload, {}, "a (common ...) statement"));
                    break;
                case InitKind::CommonBelief:
                case InitKind::CommonWhether: {
                    auto agent = task_.vocab.find_agent(decl.agent);
                    if (!agent)
                        throw ParseError(decl.loc, "'" + decl.agent + "' is not a declared agent");
                    FormulaId f = ground_fluent_formula(decl.payload, {},
                                                        "an agent init statement");
                    if (decl.kind == InitKind::CommonBelief)
                        task_.init_belief.push_back({*agent, f});
                    else
                        task_.init_whether.push_back({*agent, f});
                    break;
                }
            }
        }
    }

    void ground_goal() { task_.goal = ground_formula(problem_.goal, {}, true); }

    const std::vector<std::string>& objects_of(const std::string& type) {
        static const std::vector<std::string> empty;
        auto it = objects_by_type_.find(type);
        return it == objects_by_type_.end() ? empty : it->second;
    }

    template <typename Schema>
    void ground_schema(const Schema& schema) {
        std::vector<const std::vector<std::string>*> pools;
        pools.reserve(schema.params.size());
        for (const TypedVar& v : schema.params) pools.push_back(&objects_of(v.type));
        for (const auto* pool : pools)
            if (pool->empty()) return;  // a type with no objects grounds to nothing

        std::vector<std::size_t> odometer(schema.params.size(), 0);
        while (true) {
            Bindings bindings;
            std::string name = schema.name;
            for (std::size_t i = 0; i < schema.params.size(); ++i) {
                const std::string& value = (*pools[i])[odometer[i]];
                bindings[schema.params[i].name] = value;
                name += "_" + value;
            }
            emit(schema, name, bindings);
            if (task_.actions.size() > options_.max_ground_actions)
                throw EplanError("grounding exceeds the cap of " +
                                 std::to_string(options_.max_ground_actions) +
                                 " actions; simplify the domain or raise the limit");

            // Rightmost parameter advances fastest.
            std::size_t i = schema.params.size();
            while (i > 0) {
                --i;
                if (++odometer[i] < pools[i]->size()) break;
                odometer[i] = 0;
                if (i == 0) return;
            }
            if (schema.params.empty()) return;
        }
    }

    // Each agent may be classified once per ground action; repeating the same
    // unguarded group (e.g. :observers (?x ?y) instantiated with ?x = ?y) is
    // tolerated as idempotent.
    void set_observer(ObservabilityMap& map, std::vector<bool>& classified,
                      const ObsTermDecl& term, ObsGroup group, const Bindings& bindings) {
        AgentId agent = ground_agent(term.term, bindings);
        ObsEntry& entry = map.per_agent[agent];
        if (classified[agent]) {
            if (entry.group == group && !entry.guard && !term.guard) return;
            throw ParseError(term.term.loc, "agent '" + task_.vocab.agent_name(agent) +
                                                "' is classified twice for one action");
        }
        classified[agent] = true;
        entry.group = group;
        if (term.guard) entry.guard = ground_formula(*term.guard, bindings, false);
    }

    // Ontic effects: literal | (and E+) | (when F literal-or-and).
    void ground_ontic_effect(const SExpr& e, const Bindings& bindings,
                             std::optional<FormulaId> condition,
                             std::vector<OnticAssignment>& out) {
        std::string_view head = e.is_list() ? e.head() : std::string_view{};
        if (head == "and") {
            for (std::size_t i = 1; i < e.size(); ++i)
                ground_ontic_effect(e.items[i], bindings, condition, out);
            return;
        }
        if (head == "when") {
            if (e.size() != 3) throw ParseError(e.loc, "(when F effect) takes two arguments");
            if (condition)
                throw ParseError(e.loc, "nested (when ...) effects are not supported");
            FormulaId guard = ground_formula(e.items[1], bindings, true);
            ground_ontic_effect(e.items[2], bindings, guard, out);
            return;
        }
        OnticAssignment assignment;
        const SExpr* atom = &e;
        if (head == "not") {
            if (e.size() != 2) throw ParseError(e.loc, "malformed effect literal");
            atom = &e.items[1];
            assignment.value = false;
        }
        assignment.fluent = ground_fluent(*atom, bindings, true);
        assignment.condition = condition;
        out.push_back(assignment);
    }

    void emit(const ActionDecl& decl, const std::string& name, const Bindings& bindings) {
        ActionSpec spec;
        spec.name = name;
        spec.kind = decl.kind;
        spec.executability = decl.precondition
                                 ? ground_formula(*decl.precondition, bindings, true)
                                 : task_.store.truth();
        switch (decl.kind) {
            case ActionKind::Ontic:
                ground_ontic_effect(decl.effect, bindings, std::nullopt, spec.assignments);
                if (spec.assignments.empty())
                    throw ParseError(decl.loc, "ontic action '" + decl.name + "' has no effect");
                break;
            case ActionKind::Sensing:
                spec.sensed = ground_fluent(decl.effect, bindings, true);
                break;
            case ActionKind::Announcement:
                spec.announced = ground_formula(decl.effect, bindings, true);
                break;
        }
        spec.observability.per_agent.resize(task_.vocab.num_agents());
        std::vector<bool> classified(task_.vocab.num_agents(), false);
        for (const ObsTermDecl& term : decl.observers)
            set_observer(spec.observability, classified, term, ObsGroup::Fully, bindings);
        for (const ObsTermDecl& term : decl.p_observers)
            set_observer(spec.observability, classified, term, ObsGroup::Partially, bindings);
        if (decl.kind == ActionKind::Ontic)
            for (const ObsEntry& entry : spec.observability.per_agent)
                if (entry.group == ObsGroup::Partially)
                    throw ParseError(decl.loc, "ontic action '" + decl.name +
                                                   "' admits no partially observant agents");
        {
            std::vector<FluentId> assigned;
            for (const auto& a : spec.assignments) assigned.push_back(a.fluent);
            std::sort(assigned.begin(), assigned.end());
            if (std::adjacent_find(assigned.begin(), assigned.end()) != assigned.end())
                throw ParseError(decl.loc,
                                 "ontic action '" + decl.name + "' assigns a fluent twice");
        }
        task_.actions.push_back(GroundAction{name, std::move(spec)});
    }

    void emit(const UpdateModelDecl& decl, const std::string& name, const Bindings& bindings) {
        UpdateModel u;
        u.name = name;
        u.num_events = decl.events.size();
        std::map<std::string, EventId> event_id;
        for (EventId i = 0; i < decl.events.size(); ++i) {
            if (!event_id.emplace(decl.events[i], i).second)
                throw ParseError(decl.loc, "duplicate event '" + decl.events[i] + "'");
        }
        u.designated = event_id.at(decl.designated);
        u.pre.assign(u.num_events, task_.store.truth());
        std::set<EventId> pre_seen;
        for (const auto& [event, formula] : decl.pre) {
            EventId e = event_id.at(event);
            if (!pre_seen.insert(e).second)
                throw ParseError(decl.loc, "event '" + event + "' has two preconditions");
            u.pre[e] = ground_formula(formula, bindings, true);
        }
        u.post.resize(u.num_events);
        for (const auto& [event, cells] : decl.post) {
            EventId e = event_id.at(event);
            for (const auto& [atom, formula] : cells) {
                FluentId f = ground_fluent(atom, bindings, true);
                for (const auto& existing : u.post[e])
                    if (existing.first == f)
                        throw ParseError(decl.loc, "event '" + event + "' assigns '" +
                                                       task_.vocab.fluent_name(f) + "' twice");
                u.post[e].push_back({f, ground_formula(formula, bindings, true)});
            }
            std::sort(u.post[e].begin(), u.post[e].end());
        }

        // Explicit rows (a constant or bound parameter) beat catch-all rows
        // headed by an unbound variable; agents matching neither get an
        // empty relation.
        std::size_t n_agents = task_.vocab.num_agents();
        std::vector<std::vector<std::pair<EventId, EventId>>> explicit_rows(n_agents);
        std::vector<bool> has_explicit(n_agents, false);
        std::vector<std::pair<EventId, EventId>> catch_all;
        for (const auto& [term, pairs] : decl.accessibility) {
            std::vector<std::pair<EventId, EventId>> resolved;
            for (const auto& [from, to] : pairs)
                resolved.push_back({event_id.at(from), event_id.at(to)});
            bool unbound_var = term.is_symbol() && is_variable(term.text) &&
                               bindings.find(term.text) == bindings.end();
            if (unbound_var) {
                catch_all.insert(catch_all.end(), resolved.begin(), resolved.end());
            } else {
                AgentId agent = ground_agent(term, bindings);
                has_explicit[agent] = true;
                auto& rows = explicit_rows[agent];
                rows.insert(rows.end(), resolved.begin(), resolved.end());
            }
        }
        u.relations.resize(n_agents);
        for (std::size_t i = 0; i < n_agents; ++i) {
            auto& rel = u.relations[i];
            rel = has_explicit[i] ? explicit_rows[i] : catch_all;
            std::sort(rel.begin(), rel.end());
            rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
        }
        task_.actions.push_back(GroundAction{name, std::move(u)});
    }

    const DomainDecl& domain_;
    const ProblemDecl& problem_;
    const GroundOptions& options_;
    PlanningTask task_;
    std::map<std::string, std::string> object_type_;
    std::map<std::string, std::vector<std::string>> objects_by_type_;
    std::map<std::string, const PredicateDecl*> predicates_;
    std::set<FluentId> world_fluents_;
};

}  // namespace

PlanningTask ground(const DomainDecl& domain, const ProblemDecl& problem,
                    const GroundOptions& options) {
    return Grounder(domain, problem, options).run();
}

// ── Initial state ───────────────────────────────────────────────────────────

PointedKripke build_initial_state(const PlanningTask& task,
                                  std::vector<std::string>* diagnostics) {
    const std::vector<FluentId>& enum_fluents = task.world_fluents;
    if (enum_fluents.size() > 20)
        throw EplanError("initial state would range over 2^" +
                         std::to_string(enum_fluents.size()) +
                         " valuations; the cap is 2^20");

    std::vector<bool> designated_val(task.vocab.num_fluents(), false);
    std::set<FluentId> mentioned;
    for (auto [f, value] : task.init_literals) {
        designated_val[f] = value;
        mentioned.insert(f);
    }
    if (diagnostics != nullptr) {
        std::string missing;
        for (FluentId f : enum_fluents)
            if (!mentioned.count(f)) missing += " " + task.vocab.fluent_name(f);
        if (!missing.empty())
            diagnostics->push_back("fluents defaulting to false in the designated world:" +
                                   missing);
    }

    auto satisfies_common = [&](const std::vector<bool>& val) {
        for (FormulaId f : task.init_common)
            if (!eval_fluent_formula(task.store, f, val)) return false;
        return true;
    };
    if (!satisfies_common(designated_val))
        throw EplanError("the init literals contradict a (common ...) statement");

    std::size_t k = enum_fluents.size();
    std::vector<std::vector<bool>> worlds;
    std::int64_t designated = -1;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        std::vector<bool> val(task.vocab.num_fluents(), false);
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (std::uint64_t{1} << i)) val[enum_fluents[i]] = true;
        if (!satisfies_common(val)) continue;
        if (val == designated_val) designated = static_cast<std::int64_t>(worlds.size());
        worlds.push_back(std::move(val));
    }
    if (designated < 0) throw EplanError("internal: designated valuation missing from worlds");

    KripkeStructure m(task.vocab.num_agents(), task.vocab.num_fluents());
    for (auto& val : worlds) m.add_world(val);

    for (AgentId agent = 0; agent < task.vocab.num_agents(); ++agent) {
        std::vector<FormulaId> beliefs, whethers;
        for (auto [a, f] : task.init_belief)
            if (a == agent) beliefs.push_back(f);
        for (auto [a, f] : task.init_whether)
            if (a == agent) whethers.push_back(f);

        std::vector<bool> ok(worlds.size());
        std::vector<std::vector<bool>> profile(worlds.size());
        for (std::size_t w = 0; w < worlds.size(); ++w) {
            ok[w] = true;
            for (FormulaId f : beliefs)
                if (!eval_fluent_formula(task.store, f, worlds[w])) ok[w] = false;
            profile[w].reserve(whethers.size());
            for (FormulaId f : whethers)
                profile[w].push_back(eval_fluent_formula(task.store, f, worlds[w]));
        }

        std::map<std::vector<bool>, std::vector<WorldId>> targets_by_profile;
        for (std::size_t w = 0; w < worlds.size(); ++w)
            if (ok[w]) targets_by_profile[profile[w]].push_back(static_cast<WorldId>(w));
        for (std::size_t w = 0; w < worlds.size(); ++w) {
            auto it = targets_by_profile.find(profile[w]);
            if (it != targets_by_profile.end())
                m.set_successors(agent, static_cast<WorldId>(w), it->second);
        }
    }

    return make_pointed(std::move(m), static_cast<WorldId>(designated));
}

}  // namespace eplan::epddl
