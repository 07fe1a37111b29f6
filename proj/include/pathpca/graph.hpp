#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pathpca {

using VertexId = std::size_t;

struct Edge {
    VertexId from = 0;
    VertexId to = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Plain, unchecked graph data as read from a file or assembled by hand.
// `binding[v]` is the variable index carried by vertex v, if any; `dimension`
// is the number of variables p of the data the graph is paired with.
struct GraphDescription {
    std::size_t vertex_count = 0;
    std::vector<Edge> edges;
    VertexId source = 0;
    VertexId terminal = 0;
    std::vector<std::optional<std::size_t>> binding;
    std::size_t dimension = 0;
};

// Binding vertex v to variable v for every vertex.
std::vector<std::optional<std::size_t>> identity_binding(std::size_t vertex_count);

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
    std::string summary() const;
};

// Report-style check of every DAG invariant; never throws.
ValidationReport validate(const GraphDescription& graph);

// Kahn's algorithm with ties broken by ascending vertex id.
// Throws StructuralError if the edge relation has a cycle.
std::vector<VertexId> topological_order(const GraphDescription& graph);

// Validated, immutable DAG with compressed adjacency (successor and
// predecessor lists sorted ascending) and a cached topological order.
class Dag {
public:
    // Throws StructuralError listing every violated invariant.
    static Dag build(GraphDescription graph);

    std::size_t vertex_count() const noexcept { return description_.vertex_count; }
    std::size_t edge_count() const noexcept { return description_.edges.size(); }
    std::size_t dimension() const noexcept { return description_.dimension; }
    VertexId source() const noexcept { return description_.source; }
    VertexId terminal() const noexcept { return description_.terminal; }

    std::span<const VertexId> successors(VertexId v) const;
    std::span<const VertexId> predecessors(VertexId v) const;
    std::span<const VertexId> topological_order() const noexcept { return order_; }

    std::optional<std::size_t> binding(VertexId v) const;
    // Raw binding table; unbound vertices hold kUnbound.
    std::span<const std::size_t> bindings() const noexcept { return binding_; }

    // True when v lies on at least one S-T path.
    bool on_some_path(VertexId v) const { return on_path_[v] != 0; }

    const GraphDescription& description() const noexcept { return description_; }

    static constexpr std::size_t kUnbound = static_cast<std::size_t>(-1);

    friend bool operator==(const Dag& a, const Dag& b);

private:
    Dag() = default;

    GraphDescription description_;
    std::vector<std::size_t> out_offsets_, in_offsets_;
    std::vector<VertexId> out_targets_, in_sources_;
    std::vector<VertexId> order_;
    std::vector<std::size_t> binding_;
    std::vector<char> on_path_;
};

// (p, k, d)-layer graph parameters: p vertices in total (S and T included),
// k interior layers of m = (p-2)/k vertices, out-degree d between layers.
struct LayerGraphSpec {
    std::size_t p = 0;
    std::size_t k = 0;
    std::size_t d = 0;

    std::size_t layer_size() const noexcept { return k ? (p - 2) / k : 0; }
};

// Layer graph with circulant wiring: vertex j of a layer feeds vertices
// (j + t) mod m, t = 0..d-1, of the next one. Labels: S = 0, layer l vertex j
// = 1 + l*m + j, T = p-1. Every vertex v is bound to variable v.
// Throws UsageError on an invalid spec.
Dag build_layer_graph(const LayerGraphSpec& spec);

// Ordered S-T vertex sequence together with the sorted set of variables
// bound along it.
struct Path {
    std::vector<VertexId> vertices;
    std::vector<std::size_t> support;

    friend bool operator==(const Path&, const Path&) = default;
};

// Builds a Path from a vertex sequence; throws StructuralError if the sequence
// is not an S-T path of the dag.
Path make_path(const Dag& dag, std::vector<VertexId> vertices);

// True when `vertices` is an S-T path of the dag.
bool is_st_path(const Dag& dag, std::span<const VertexId> vertices);

struct PathCount {
    std::uint64_t count = 0;
    bool saturated = false;  // true count exceeds 2^64 - 1
};

PathCount count_paths(const Dag& dag);

// Visits every S-T path in lexicographic order of vertex sequence.
// Throws CapacityError if the path count exceeds `cap`.
void for_each_path(const Dag& dag, std::uint64_t cap,
                   const std::function<void(std::span<const VertexId>)>& visit);

std::vector<Path> enumerate_paths(const Dag& dag, std::uint64_t cap);

}  // namespace pathpca
