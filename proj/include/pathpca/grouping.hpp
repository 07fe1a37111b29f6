#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathpca/graph.hpp"

namespace pathpca {

// Partition of the variables into labelled groups; the group order is the
// layer order of the derived graph.
struct GroupingSpec {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> members;

    std::size_t variable_count() const;
};

// Lines `<variable> <label>`, `#` comments. Groups are ordered by first
// appearance; the variables must be exactly 0..p-1, each listed once.
GroupingSpec parse_grouping(std::istream& in, const std::string& source_name = "<grouping>");
GroupingSpec read_grouping_file(const std::string& path);

// Layered DAG over the groups: an unbound source feeding every member of the
// first group, complete bipartite wiring between consecutive groups, and every
// member of the last group feeding an unbound terminal. S = 0, members take
// ids 1..p in group order, T = p + 1. Every S-T path picks exactly one
// variable per group. Throws UsageError on an empty or inconsistent grouping.
Dag build_group_graph(const GroupingSpec& grouping);

}  // namespace pathpca
