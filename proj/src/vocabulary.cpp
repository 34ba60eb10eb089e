#include "eplan/vocabulary.hpp"

#include <algorithm>
#include <cctype>

#include "eplan/errors.hpp"

namespace eplan {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

AgentSet make_agent_set(std::vector<AgentId> agents) {
    std::sort(agents.begin(), agents.end());
    agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
    if (agents.empty()) throw EplanError("agent group must be nonempty");
    return agents;
}

FluentId Vocabulary::add_fluent(std::string_view name) {
    std::string key = to_lower(name);
    auto it = fluent_index_.find(key);
    if (it != fluent_index_.end()) return it->second;
    auto id = static_cast<FluentId>(fluent_names_.size());
    fluent_index_.emplace(key, id);
    fluent_names_.push_back(std::move(key));
    return id;
}

AgentId Vocabulary::add_agent(std::string_view name) {
    std::string key = to_lower(name);
    auto it = agent_index_.find(key);
    if (it != agent_index_.end()) return it->second;
    auto id = static_cast<AgentId>(agent_names_.size());
    agent_index_.emplace(key, id);
    agent_names_.push_back(std::move(key));
    return id;
}

std::optional<FluentId> Vocabulary::find_fluent(std::string_view name) const {
    auto it = fluent_index_.find(to_lower(name));
    if (it == fluent_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<AgentId> Vocabulary::find_agent(std::string_view name) const {
    auto it = agent_index_.find(to_lower(name));
    if (it == agent_index_.end()) return std::nullopt;
    return it->second;
}

AgentSet Vocabulary::all_agents() const {
    AgentSet all(num_agents());
    for (AgentId i = 0; i < all.size(); ++i) all[i] = i;
    return all;
}

}  // namespace eplan
