#include "eplan/dot.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace eplan {

std::string emit_dot(const PointedKripke& state, const Vocabulary& vocab) {
    PointedKripke q = bisim_contract(state);
    const KripkeStructure& m = *q.structure;
    std::vector<WorldId> order = canonical_order(m);
    std::vector<std::uint32_t> pos(m.num_worlds());
    for (std::uint32_t i = 0; i < order.size(); ++i) pos[order[i]] = i;

    std::ostringstream out;
    out << "digraph estate {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=circle];\n";
    for (std::uint32_t i = 0; i < order.size(); ++i) {
        WorldId w = order[i];
        std::vector<std::string> names;
        for (FluentId f = 0; f < m.num_fluents(); ++f)
            if (m.valuation(w)[f]) names.push_back(vocab.fluent_name(f));
        std::sort(names.begin(), names.end());
        std::string label;
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (j > 0) label += "\\n";
            label += names[j];
        }
        out << "  w" << i;
        out << " [";
        if (w == q.designated) out << "shape=doublecircle, ";
        out << "label=\"" << label << "\"];\n";
    }

    std::vector<std::tuple<AgentId, std::uint32_t, std::uint32_t>> edges;
    for (AgentId a = 0; a < m.num_agents(); ++a)
        for (WorldId w = 0; w < m.num_worlds(); ++w)
            for (WorldId t : m.successors(a, w)) edges.push_back({a, pos[w], pos[t]});
    std::sort(edges.begin(), edges.end());
    for (auto [a, s, t] : edges)
        out << "  w" << s << " -> w" << t << " [label=\"" << vocab.agent_name(a) << "\"];\n";
    out << "}\n";
    return out.str();
}

}  // namespace eplan
