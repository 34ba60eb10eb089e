#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace eplan {

// Interned identifiers. Symbols are case-insensitive; the vocabulary
// normalizes everything to lower case at interning time so that equality
// is a plain integer compare everywhere else.
using FluentId = std::uint32_t;
using AgentId = std::uint32_t;

// Nonempty, sorted, duplicate-free set of agents (the group of an E/C
// operator).
using AgentSet = std::vector<AgentId>;

std::string to_lower(std::string_view s);

// Sorts, deduplicates, and rejects the empty set.
AgentSet make_agent_set(std::vector<AgentId> agents);

// The fluent and agent signature of one planning problem. Built while
// parsing/grounding (single-threaded), read-only afterwards.
class Vocabulary {
public:
    FluentId add_fluent(std::string_view name);
    AgentId add_agent(std::string_view name);

    std::optional<FluentId> find_fluent(std::string_view name) const;
    std::optional<AgentId> find_agent(std::string_view name) const;

    const std::string& fluent_name(FluentId f) const { return fluent_names_.at(f); }
    const std::string& agent_name(AgentId a) const { return agent_names_.at(a); }

    std::size_t num_fluents() const noexcept { return fluent_names_.size(); }
    std::size_t num_agents() const noexcept { return agent_names_.size(); }

    AgentSet all_agents() const;

private:
    std::vector<std::string> fluent_names_;
    std::vector<std::string> agent_names_;
    std::unordered_map<std::string, FluentId> fluent_index_;
    std::unordered_map<std::string, AgentId> agent_index_;
};

}  // namespace eplan
