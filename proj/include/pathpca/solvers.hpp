#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "pathpca/data_model.hpp"
#include "pathpca/graph.hpp"
#include "pathpca/projection.hpp"

namespace pathpca {

enum class InitKind {
    diag_heuristic,  // projection of the column with the largest diagonal entry
    given_vector,    // projection of `PowerMethodConfig::start`
    random,          // projection of a Gaussian vector drawn from `seed`
};

struct PowerMethodConfig {
    std::size_t max_iters = 1000;
    double tol = 1e-9;
    InitKind init = InitKind::diag_heuristic;
    Eigen::VectorXd start;
    std::uint64_t seed = 0;
    bool keep_iterates = false;
};

struct SampleProjectConfig {
    std::size_t r = 2;
    std::size_t budget = 1000;
    std::uint64_t seed = 0;
};

// Number of sphere samples for a target net resolution eps:
// ceil((2/eps)^r * ln p). A rule of thumb, not a guarantee.
std::size_t budget_for_accuracy(double eps, std::size_t r, std::size_t p);

struct EstimateResult {
    ProjectedVector x_hat;
    double objective = 0.0;  // x_hat^T sigma x_hat
    std::size_t iterations_or_samples = 0;
    std::vector<double> trace;
    // Rank-r objective ||V^T x_hat||^2; only set by sample_and_project.
    double low_rank_objective = std::numeric_limits<double>::quiet_NaN();
    // Every iterate including the start; filled when keep_iterates is set.
    std::vector<ProjectedVector> iterates;
};

// Graph-truncated power iteration x <- Proj(sigma x). Stops when the iterate
// moves less than tol, when the support has been stable for two consecutive
// steps and the objective changed by at most tol, or after max_iters steps.
// Returns the best iterate seen.
EstimateResult graph_truncated_power(const CovarianceEstimate& sigma, const Dag& dag,
                                     const PowerMethodConfig& cfg = {});

// Low-rank sample-and-project: projects V c for `budget` directions c drawn
// uniformly from the upper half of the r-sphere (c and -c give the same
// candidate up to sign) and keeps the candidate maximizing ||V^T x||^2,
// first index on ties.
EstimateResult sample_and_project(const CovarianceEstimate& sigma, const Dag& dag,
                                  const SampleProjectConfig& cfg);

// Exact solver: the leading eigenpair of sigma restricted to each path
// support, maximized over all paths. Throws CapacityError above `cap` paths.
EstimateResult brute_force_solve(const CovarianceEstimate& sigma, const Dag& dag,
                                 std::uint64_t cap);

struct SparseEstimateResult {
    Eigen::VectorXd x;
    std::vector<std::size_t> support;
    double objective = 0.0;
    std::size_t iterations = 0;
    std::vector<double> trace;
};

// Keeps the k largest magnitudes (smaller index first on ties) and
// renormalizes. A vector that is zero on those entries maps to the uniform
// vector on them.
Eigen::VectorXd truncate_top_k(const Eigen::VectorXd& w, std::size_t k);

// Truncated power method for k-sparse PCA, the unstructured baseline. The
// diag heuristic starts from the top-k truncation of the largest-diagonal column.
SparseEstimateResult sparse_truncated_power(const CovarianceEstimate& sigma, std::size_t k,
                                            const PowerMethodConfig& cfg = {});

}  // namespace pathpca
