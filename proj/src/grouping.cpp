#include "pathpca/grouping.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include "pathpca/errors.hpp"

namespace pathpca {

std::size_t GroupingSpec::variable_count() const {
    std::size_t total = 0;
    for (const auto& group : members) total += group.size();
    return total;
}

GroupingSpec parse_grouping(std::istream& in, const std::string& name) {
    GroupingSpec spec;
    std::map<std::string, std::size_t> group_of;
    std::map<std::size_t, std::size_t> seen_at;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = raw;
        if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        const auto first = text.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) continue;
        text = text.substr(first, text.find_last_not_of(" \t\r") - first + 1);

        const auto gap = text.find_first_of(" \t");
        if (gap == std::string_view::npos) throw ParseError(name, line, "expected '<variable> <label>'");
        const auto index_token = text.substr(0, gap);
        std::size_t variable = 0;
        const auto [ptr, ec] =
            std::from_chars(index_token.data(), index_token.data() + index_token.size(), variable);
        if (ec != std::errc() || ptr != index_token.data() + index_token.size())
            throw ParseError(name, line, "bad variable index '" + std::string(index_token) + "'");
        const std::string label(text.substr(text.find_first_not_of(" \t", gap)));

        if (auto [it, fresh] = seen_at.emplace(variable, line); !fresh)
            throw ParseError(name, line, "variable " + std::to_string(variable) +
                                             " already assigned on line " + std::to_string(it->second));
        auto [it, fresh] = group_of.emplace(label, spec.labels.size());
        if (fresh) {
            spec.labels.push_back(label);
            spec.members.emplace_back();
        }
        spec.members[it->second].push_back(variable);
    }
    if (spec.labels.empty()) throw ParseError(name, line, "grouping defines no groups");
    const std::size_t p = seen_at.size();
    if (seen_at.rbegin()->first != p - 1)
        throw ParseError(name, 0, "variables must be exactly 0.." + std::to_string(p - 1) +
                                      ", largest index is " + std::to_string(seen_at.rbegin()->first));
    return spec;
}

GroupingSpec read_grouping_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    return parse_grouping(in, path);
}

Dag build_group_graph(const GroupingSpec& grouping) {
    if (grouping.members.empty()) throw UsageError("grouping has no groups");
    if (grouping.labels.size() != grouping.members.size())
        throw UsageError("grouping has " + std::to_string(grouping.labels.size()) + " labels for " +
                         std::to_string(grouping.members.size()) + " groups");
    const std::size_t p = grouping.variable_count();
    std::vector<char> used(p, 0);
    for (std::size_t g = 0; g < grouping.members.size(); ++g) {
        if (grouping.members[g].empty()) throw UsageError("group '" + grouping.labels[g] + "' is empty");
        for (std::size_t v : grouping.members[g]) {
            if (v >= p || used[v])
                throw UsageError("variables must be 0.." + std::to_string(p - 1) + ", each in one group");
            used[v] = 1;
        }
    }

    GraphDescription g;
    g.vertex_count = p + 2;
    g.source = 0;
    g.terminal = p + 1;
    g.dimension = p;
    g.binding.assign(p + 2, std::nullopt);

    std::vector<std::vector<VertexId>> layers;
    VertexId next = 1;
    for (const auto& group : grouping.members) {
        auto& layer = layers.emplace_back();
        for (std::size_t variable : group) {
            g.binding[next] = variable;
            layer.push_back(next++);
        }
    }
    for (VertexId v : layers.front()) g.edges.push_back({g.source, v});
    for (std::size_t l = 0; l + 1 < layers.size(); ++l)
        for (VertexId a : layers[l])
            for (VertexId b : layers[l + 1]) g.edges.push_back({a, b});
    for (VertexId v : layers.back()) g.edges.push_back({v, g.terminal});
    return Dag::build(std::move(g));
}

}  // namespace pathpca
