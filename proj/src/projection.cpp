#include "pathpca/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pathpca/errors.hpp"

namespace pathpca {

WeightedPathResult longest_weighted_path(const Dag& dag, std::span<const double> weights) {
    if (weights.size() != dag.dimension())
        throw DimensionError("weight vector has length " + std::to_string(weights.size()) +
                             ", graph binds " + std::to_string(dag.dimension()) + " variables");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw NumericError("vertex weights must be finite and nonnegative");

    const std::size_t n = dag.vertex_count();
    const auto bindings = dag.bindings();
    // Per-thread scratch, reused so repeated projections do not churn the allocator.
    thread_local std::vector<double> best;
    thread_local std::vector<VertexId> next;
    best.assign(n, -std::numeric_limits<double>::infinity());
    next.assign(n, n);

    // best[v]: heaviest v-T suffix. Successors ascend and only a strictly
    // heavier one replaces the incumbent, so next[v] is the smallest id among
    // the optimal continuations.
    const auto order = dag.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const VertexId v = *it;
        if (!dag.on_some_path(v)) continue;
        const double own = bindings[v] == Dag::kUnbound ? 0.0 : weights[bindings[v]];
        if (v == dag.terminal()) {
            best[v] = own;
            continue;
        }
        double tail = -std::numeric_limits<double>::infinity();
        VertexId arg = n;
        for (VertexId u : dag.successors(v)) {
            if (best[u] > tail) {
                tail = best[u];
                arg = u;
            }
        }
        best[v] = own + tail;
        next[v] = arg;
    }

    WeightedPathResult result;
    result.weight = best[dag.source()];
    for (VertexId v = dag.source();; v = next[v]) {
        result.path.vertices.push_back(v);
        if (bindings[v] != Dag::kUnbound) result.path.support.push_back(bindings[v]);
        if (v == dag.terminal()) break;
    }
    std::sort(result.path.support.begin(), result.path.support.end());
    return result;
}

ProjectedVector project(const Dag& dag, const Eigen::VectorXd& w) {
    if (static_cast<std::size_t>(w.size()) != dag.dimension())
        throw DimensionError("vector has length " + std::to_string(w.size()) + ", graph binds " +
                             std::to_string(dag.dimension()) + " variables");
    if (!w.allFinite()) throw NumericError("cannot project a vector with non-finite entries");

    // Rescale by a power of two so squaring neither overflows nor underflows;
    // the scaling is exact and leaves the argmax unchanged.
    const double peak = w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
    int exponent = 0;
    if (peak > 0.0) std::frexp(peak, &exponent);
    const double scale = std::ldexp(1.0, -exponent);
    thread_local Eigen::VectorXd squared;
    squared = (w * scale).cwiseAbs2();

    WeightedPathResult heaviest =
        longest_weighted_path(dag, std::span<const double>(squared.data(), squared.size()));

    ProjectedVector out;
    out.x = Eigen::VectorXd::Zero(w.size());
    double norm2 = 0.0;
    for (std::size_t i : heaviest.path.support) norm2 += squared[i];
    if (norm2 > 0.0) {
        const double norm = std::sqrt(norm2);
        for (std::size_t i : heaviest.path.support) out.x[i] = w[i] * scale / norm;
    } else {
        const double uniform = 1.0 / std::sqrt(static_cast<double>(heaviest.path.support.size()));
        for (std::size_t i : heaviest.path.support) out.x[i] = uniform;
        out.degenerate = true;
    }
    out.path = std::move(heaviest.path);
    return out;
}

bool is_feasible(const Dag& dag, const ProjectedVector& v, double tol) {
    if (static_cast<std::size_t>(v.x.size()) != dag.dimension()) return false;
    if (!is_st_path(dag, v.path.vertices)) return false;
    std::vector<std::size_t> support;
    for (VertexId u : v.path.vertices)
        if (auto b = dag.binding(u)) support.push_back(*b);
    std::sort(support.begin(), support.end());
    if (support != v.path.support) return false;
    for (Eigen::Index i = 0; i < v.x.size(); ++i)
        if (v.x[i] != 0.0 &&
            !std::binary_search(support.begin(), support.end(), static_cast<std::size_t>(i)))
            return false;
    return std::abs(v.x.norm() - 1.0) <= tol;
}

}  // namespace pathpca
