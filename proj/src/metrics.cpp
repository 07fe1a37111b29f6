#include "pathpca/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "pathpca/errors.hpp"

namespace pathpca {

namespace {

void require_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size())
        throw DimensionError("vectors have lengths " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()));
}

void require_unit(const Eigen::VectorXd& x) {
    if (!x.allFinite() || std::abs(x.norm() - 1.0) > 1e-9)
        throw NumericError("expected a unit vector, norm is " + std::to_string(x.norm()));
}

}  // namespace

double projector_distance(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star) {
    require_same_length(x_hat, x_star);
    require_unit(x_hat);
    require_unit(x_star);
    const double overlap = std::min(1.0, std::abs(x_hat.dot(x_star)));
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap * overlap));
}

double support_jaccard(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star,
                       double zero_tol) {
    require_same_length(x_hat, x_star);
    if (!(zero_tol >= 0.0)) throw UsageError("zero_tol must be nonnegative");
    std::size_t both = 0, either = 0;
    for (Eigen::Index i = 0; i < x_hat.size(); ++i) {
        const bool a = std::abs(x_hat[i]) > zero_tol;
        const bool b = std::abs(x_star[i]) > zero_tol;
        both += a && b;
        either += a || b;
    }
    if (either == 0) return 0.0;
    return 1.0 - static_cast<double>(both) / static_cast<double>(either);
}

double explained_variance(const Eigen::VectorXd& x, const CovarianceEstimate& sigma) {
    if (static_cast<std::size_t>(x.size()) != sigma.dimension())
        throw DimensionError("vector has length " + std::to_string(x.size()) + ", covariance is " +
                             std::to_string(sigma.dimension()) + "-dimensional");
    require_unit(x);
    return x.dot(sigma.matrix() * x);
}

EvalReport evaluate(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star,
                    const CovarianceEstimate& sigma, double zero_tol) {
    return {projector_distance(x_hat, x_star), support_jaccard(x_hat, x_star, zero_tol),
            explained_variance(x_hat, sigma)};
}

}  // namespace pathpca
