#pragma once

#include <span>

#include <Eigen/Dense>

#include "pathpca/graph.hpp"

namespace pathpca {

struct WeightedPathResult {
    Path path;
    double weight = 0.0;  // sum of the variable weights along the path
};

// Unit vector whose support lies on `path`. `degenerate` marks the uniform
// fallback used when the input vanished on the selected path.
struct ProjectedVector {
    Eigen::VectorXd x;
    Path path;
    bool degenerate = false;
};

// Heaviest S-T path under nonnegative per-variable weights (unbound vertices
// weigh 0), in one pass over the cached topological order. Among maximizers
// the lexicographically smallest vertex sequence wins.
// Throws DimensionError on a length mismatch, NumericError on negative or
// non-finite weights.
WeightedPathResult longest_weighted_path(const Dag& dag, std::span<const double> variable_weights);

// Euclidean projection of w onto the unit vectors supported on an S-T path:
// picks the path maximizing the sum of w_i^2 and returns w restricted to it,
// normalized.
ProjectedVector project(const Dag& dag, const Eigen::VectorXd& w);

// Membership check for the feasible set: unit norm within `tol`, the path is
// an S-T path of the dag, and every nonzero entry is bound on that path.
bool is_feasible(const Dag& dag, const ProjectedVector& v, double tol = 1e-12);

}  // namespace pathpca
