#include "pathpca/graph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <sstream>

#include "pathpca/errors.hpp"

namespace pathpca {

namespace {

struct Adjacency {
    std::vector<std::size_t> out_offsets, in_offsets;
    std::vector<VertexId> out_targets, in_sources;
};

// Assumes every edge endpoint is in range.
Adjacency make_adjacency(const GraphDescription& g) {
    const std::size_t n = g.vertex_count;
    Adjacency adj;
    adj.out_offsets.assign(n + 1, 0);
    adj.in_offsets.assign(n + 1, 0);
    for (const Edge& e : g.edges) {
        ++adj.out_offsets[e.from + 1];
        ++adj.in_offsets[e.to + 1];
    }
    for (std::size_t v = 0; v < n; ++v) {
        adj.out_offsets[v + 1] += adj.out_offsets[v];
        adj.in_offsets[v + 1] += adj.in_offsets[v];
    }
    adj.out_targets.resize(g.edges.size());
    adj.in_sources.resize(g.edges.size());
    std::vector<std::size_t> out_fill(adj.out_offsets.begin(), adj.out_offsets.end() - 1);
    std::vector<std::size_t> in_fill(adj.in_offsets.begin(), adj.in_offsets.end() - 1);
    for (const Edge& e : g.edges) {
        adj.out_targets[out_fill[e.from]++] = e.to;
        adj.in_sources[in_fill[e.to]++] = e.from;
    }
    for (std::size_t v = 0; v < n; ++v) {
        std::sort(adj.out_targets.begin() + adj.out_offsets[v],
                  adj.out_targets.begin() + adj.out_offsets[v + 1]);
        std::sort(adj.in_sources.begin() + adj.in_offsets[v],
                  adj.in_sources.begin() + adj.in_offsets[v + 1]);
    }
    return adj;
}

// Kahn's algorithm; returns a partial order when there is a cycle.
std::vector<VertexId> kahn(std::size_t n, const Adjacency& adj) {
    std::vector<std::size_t> indegree(n);
    for (std::size_t v = 0; v < n; ++v) indegree[v] = adj.in_offsets[v + 1] - adj.in_offsets[v];
    std::priority_queue<VertexId, std::vector<VertexId>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push(v);
    std::vector<VertexId> order;
    order.reserve(n);
    while (!ready.empty()) {
        const VertexId v = ready.top();
        ready.pop();
        order.push_back(v);
        for (std::size_t e = adj.out_offsets[v]; e < adj.out_offsets[v + 1]; ++e)
            if (--indegree[adj.out_targets[e]] == 0) ready.push(adj.out_targets[e]);
    }
    return order;
}

// Marks vertices reachable from S and co-reachable to T along the order.
std::vector<char> on_path_mask(const GraphDescription& g, const Adjacency& adj,
                               const std::vector<VertexId>& order) {
    const std::size_t n = g.vertex_count;
    std::vector<char> from_source(n, 0), to_terminal(n, 0);
    from_source[g.source] = 1;
    for (VertexId v : order) {
        if (!from_source[v]) continue;
        for (std::size_t e = adj.out_offsets[v]; e < adj.out_offsets[v + 1]; ++e)
            from_source[adj.out_targets[e]] = 1;
    }
    to_terminal[g.terminal] = 1;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const VertexId v = *it;
        for (std::size_t e = adj.out_offsets[v]; e < adj.out_offsets[v + 1]; ++e)
            if (to_terminal[adj.out_targets[e]]) {
                to_terminal[v] = 1;
                break;
            }
    }
    std::vector<char> mask(n);
    for (std::size_t v = 0; v < n; ++v) mask[v] = from_source[v] && to_terminal[v];
    return mask;
}

}  // namespace

std::vector<std::optional<std::size_t>> identity_binding(std::size_t vertex_count) {
    std::vector<std::optional<std::size_t>> b(vertex_count);
    for (std::size_t v = 0; v < vertex_count; ++v) b[v] = v;
    return b;
}

std::string ValidationReport::summary() const {
    if (ok()) return "ok";
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) out << "; ";
        out << violations[i];
    }
    return out.str();
}

ValidationReport validate(const GraphDescription& g) {
    ValidationReport report;
    auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };
    const std::size_t n = g.vertex_count;

    if (n < 2) fail("graph needs at least 2 vertices, has " + std::to_string(n));
    if (g.source >= n) fail("source " + std::to_string(g.source) + " out of range");
    if (g.terminal >= n) fail("terminal " + std::to_string(g.terminal) + " out of range");
    if (g.source == g.terminal) fail("source and terminal coincide");
    if (g.binding.size() != n)
        fail("binding table has " + std::to_string(g.binding.size()) + " entries for " +
             std::to_string(n) + " vertices");

    bool edges_in_range = true;
    for (const Edge& e : g.edges) {
        if (e.from >= n || e.to >= n) {
            fail("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                 " references a missing vertex");
            edges_in_range = false;
        }
    }

    if (g.binding.size() == n) {
        std::vector<std::size_t> seen;
        for (std::size_t v = 0; v < n; ++v) {
            if (!g.binding[v]) continue;
            if (*g.binding[v] >= g.dimension)
                fail("vertex " + std::to_string(v) + " bound to variable " +
                     std::to_string(*g.binding[v]) + " outside [0, " + std::to_string(g.dimension) +
                     ")");
            seen.push_back(*g.binding[v]);
        }
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 1; i < seen.size(); ++i)
            if (seen[i] == seen[i - 1] && (i == 1 || seen[i - 2] != seen[i]))
                fail("variable " + std::to_string(seen[i]) + " bound to more than one vertex");
    }

    if (!edges_in_range || g.source >= n || g.terminal >= n || n < 2) return report;

    std::vector<Edge> sorted = g.edges;
    std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
        return a.from != b.from ? a.from < b.from : a.to < b.to;
    });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1])
            fail("duplicate edge " + std::to_string(sorted[i].from) + "->" +
                 std::to_string(sorted[i].to));

    const Adjacency adj = make_adjacency(g);
    if (adj.in_offsets[g.source + 1] != adj.in_offsets[g.source])
        fail("source " + std::to_string(g.source) + " has incoming edges");
    if (adj.out_offsets[g.terminal + 1] != adj.out_offsets[g.terminal])
        fail("terminal " + std::to_string(g.terminal) + " has outgoing edges");

    const std::vector<VertexId> order = kahn(n, adj);
    if (order.size() != n) {
        fail("cycle found (" + std::to_string(n - order.size()) + " vertices on or behind a cycle)");
        return report;
    }

    const std::vector<char> mask = on_path_mask(g, adj, order);
    if (!mask[g.source]) {
        fail("no S-T path");
        return report;
    }

    // Every S-T path must carry at least one variable, otherwise the feasible
    // set would contain an empty support. Fewest bound vertices on an S-T path:
    if (g.binding.size() == n) {
        constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> fewest(n, inf);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const VertexId v = *it;
            if (!mask[v]) continue;
            std::size_t tail = v == g.terminal ? 0 : inf;
            for (std::size_t e = adj.out_offsets[v]; e < adj.out_offsets[v + 1]; ++e)
                tail = std::min(tail, fewest[adj.out_targets[e]]);
            if (tail != inf) fewest[v] = tail + (g.binding[v] ? 1 : 0);
        }
        if (fewest[g.source] == 0) fail("an S-T path carries no bound variable");
    }
    return report;
}

std::vector<VertexId> topological_order(const GraphDescription& g) {
    for (const Edge& e : g.edges)
        if (e.from >= g.vertex_count || e.to >= g.vertex_count)
            throw StructuralError("edge references a missing vertex");
    std::vector<VertexId> order = kahn(g.vertex_count, make_adjacency(g));
    if (order.size() != g.vertex_count) throw StructuralError("cycle found");
    return order;
}

Dag Dag::build(GraphDescription graph) {
    const ValidationReport report = validate(graph);
    if (!report.ok()) throw StructuralError("invalid graph: " + report.summary());

    Dag dag;
    Adjacency adj = make_adjacency(graph);
    dag.order_ = kahn(graph.vertex_count, adj);
    dag.on_path_ = on_path_mask(graph, adj, dag.order_);
    dag.out_offsets_ = std::move(adj.out_offsets);
    dag.in_offsets_ = std::move(adj.in_offsets);
    dag.out_targets_ = std::move(adj.out_targets);
    dag.in_sources_ = std::move(adj.in_sources);
    dag.binding_.resize(graph.vertex_count, kUnbound);
    for (std::size_t v = 0; v < graph.vertex_count; ++v)
        if (graph.binding[v]) dag.binding_[v] = *graph.binding[v];
    dag.description_ = std::move(graph);
    return dag;
}

std::span<const VertexId> Dag::successors(VertexId v) const {
    return {out_targets_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
}

std::span<const VertexId> Dag::predecessors(VertexId v) const {
    return {in_sources_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
}

std::optional<std::size_t> Dag::binding(VertexId v) const {
    if (binding_[v] == kUnbound) return std::nullopt;
    return binding_[v];
}

bool operator==(const Dag& a, const Dag& b) {
    return a.description_.vertex_count == b.description_.vertex_count &&
           a.description_.source == b.description_.source &&
           a.description_.terminal == b.description_.terminal &&
           a.description_.dimension == b.description_.dimension &&
           a.out_offsets_ == b.out_offsets_ && a.out_targets_ == b.out_targets_ &&
           a.binding_ == b.binding_;
}

Dag build_layer_graph(const LayerGraphSpec& spec) {
    if (spec.k < 1) throw UsageError("layer graph needs k >= 1");
    if (spec.p < 2 + spec.k)
        throw UsageError("layer graph needs p >= k + 2 (p=" + std::to_string(spec.p) +
                         ", k=" + std::to_string(spec.k) + ")");
    if ((spec.p - 2) % spec.k != 0)
        throw UsageError("p - 2 = " + std::to_string(spec.p - 2) + " is not divisible by k = " +
                         std::to_string(spec.k));
    const std::size_t m = spec.layer_size();
    if (spec.d < 1 || spec.d > m)
        throw UsageError("out-degree d = " + std::to_string(spec.d) + " outside [1, " +
                         std::to_string(m) + "]");

    GraphDescription g;
    g.vertex_count = spec.p;
    g.source = 0;
    g.terminal = spec.p - 1;
    g.dimension = spec.p;
    g.binding = identity_binding(spec.p);
    g.edges.reserve(2 * m + (spec.k - 1) * m * spec.d);
    auto vertex = [m](std::size_t layer, std::size_t j) { return 1 + layer * m + j; };
    for (std::size_t j = 0; j < m; ++j) g.edges.push_back({g.source, vertex(0, j)});
    for (std::size_t layer = 0; layer + 1 < spec.k; ++layer)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t t = 0; t < spec.d; ++t)
                g.edges.push_back({vertex(layer, j), vertex(layer + 1, (j + t) % m)});
    for (std::size_t j = 0; j < m; ++j) g.edges.push_back({vertex(spec.k - 1, j), g.terminal});
    return Dag::build(std::move(g));
}

bool is_st_path(const Dag& dag, std::span<const VertexId> vertices) {
    if (vertices.size() < 2 || vertices.front() != dag.source() || vertices.back() != dag.terminal())
        return false;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        if (vertices[i] >= dag.vertex_count()) return false;
        auto next = dag.successors(vertices[i]);
        if (!std::binary_search(next.begin(), next.end(), vertices[i + 1])) return false;
    }
    return true;
}

Path make_path(const Dag& dag, std::vector<VertexId> vertices) {
    if (!is_st_path(dag, vertices)) throw StructuralError("vertex sequence is not an S-T path");
    Path path;
    for (VertexId v : vertices)
        if (auto b = dag.binding(v)) path.support.push_back(*b);
    std::sort(path.support.begin(), path.support.end());
    path.vertices = std::move(vertices);
    return path;
}

PathCount count_paths(const Dag& dag) {
    constexpr std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> to_terminal(dag.vertex_count(), 0);
    std::vector<char> saturated(dag.vertex_count(), 0);
    const auto order = dag.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const VertexId v = *it;
        if (v == dag.terminal()) {
            to_terminal[v] = 1;
            continue;
        }
        std::uint64_t total = 0;
        char sat = 0;
        for (VertexId u : dag.successors(v)) {
            sat |= saturated[u];
            if (total > max - to_terminal[u]) {
                total = max;
                sat = 1;
            } else {
                total += to_terminal[u];
            }
        }
        to_terminal[v] = total;
        saturated[v] = sat;
    }
    return {to_terminal[dag.source()], saturated[dag.source()] != 0};
}

void for_each_path(const Dag& dag, std::uint64_t cap,
                   const std::function<void(std::span<const VertexId>)>& visit) {
    const PathCount count = count_paths(dag);
    if (count.saturated || count.count > cap)
        throw CapacityError("graph has " +
                            (count.saturated ? std::string("more than 2^64") : std::to_string(count.count)) +
                            " S-T paths, enumeration cap is " + std::to_string(cap));

    // Iterative DFS over vertices that still reach T; successors ascend, so
    // paths come out in lexicographic order.
    std::vector<VertexId> stack{dag.source()};
    std::vector<std::size_t> cursor{0};
    while (!stack.empty()) {
        const VertexId v = stack.back();
        if (v == dag.terminal()) {
            visit(stack);
            stack.pop_back();
            cursor.pop_back();
            continue;
        }
        const auto next = dag.successors(v);
        std::size_t& c = cursor.back();
        while (c < next.size() && !dag.on_some_path(next[c])) ++c;
        if (c == next.size()) {
            stack.pop_back();
            cursor.pop_back();
            continue;
        }
        stack.push_back(next[c++]);
        cursor.push_back(0);
    }
}

std::vector<Path> enumerate_paths(const Dag& dag, std::uint64_t cap) {
    std::vector<Path> paths;
    for_each_path(dag, cap, [&](std::span<const VertexId> vertices) {
        Path path;
        path.vertices.assign(vertices.begin(), vertices.end());
        for (VertexId v : vertices)
            if (auto b = dag.binding(v)) path.support.push_back(*b);
        std::sort(path.support.begin(), path.support.end());
        paths.push_back(std::move(path));
    });
    return paths;
}

}  // namespace pathpca
