#pragma once

#include <Eigen/Dense>

#include "pathpca/data_model.hpp"

namespace pathpca {

struct EvalReport {
    double projector_loss = 0.0;  // in [0, sqrt(2)]
    double jaccard = 0.0;         // in [0, 1]
    double explained_variance = 0.0;
};

// ||x_hat x_hat^T - x_star x_star^T||_F = sqrt(2 - 2 (x_hat . x_star)^2).
// Throws NumericError unless both inputs have unit norm within 1e-9.
double projector_distance(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star);

// 1 - |A n B| / |A u B| over the supports {i : |x_i| > zero_tol}; 0 when both
// supports are empty.
double support_jaccard(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star,
                       double zero_tol = 1e-12);

// x^T sigma x for a unit vector x.
double explained_variance(const Eigen::VectorXd& x, const CovarianceEstimate& sigma);

EvalReport evaluate(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star,
                    const CovarianceEstimate& sigma, double zero_tol = 1e-12);

}  // namespace pathpca
