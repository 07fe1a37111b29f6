#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace pathpca {

// Spiked covariance model I + beta * x_star x_star^T.
struct SpikedModelParams {
    Eigen::VectorXd x_star;
    double beta = 1.0;
};

// p x n observations, one column per sample.
struct SampleMatrix {
    Eigen::MatrixXd Y;

    std::size_t p() const noexcept { return static_cast<std::size_t>(Y.rows()); }
    std::size_t n() const noexcept { return static_cast<std::size_t>(Y.cols()); }
};

class CovarianceEstimate;
CovarianceEstimate empirical_covariance(const SampleMatrix& samples);
CovarianceEstimate covariance_with_spectrum(const Eigen::VectorXd& x_star,
                                            const Eigen::VectorXd& spectrum);

// Symmetric positive semidefinite p x p matrix. Instances obtained through
// from_matrix are checked; the library's own constructors are PSD by
// construction.
class CovarianceEstimate {
public:
    // Throws NumericError unless the matrix is square, finite, symmetric
    // within 1e-12 (relative) and has smallest eigenvalue >= -1e-8 * ||m||_2.
    // The stored matrix is exactly symmetric.
    static CovarianceEstimate from_matrix(Eigen::MatrixXd m);

    const Eigen::MatrixXd& matrix() const noexcept { return sigma_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(sigma_.rows()); }

private:
    explicit CovarianceEstimate(Eigen::MatrixXd m) : sigma_(std::move(m)) {}

    friend CovarianceEstimate empirical_covariance(const SampleMatrix& samples);
    friend CovarianceEstimate covariance_with_spectrum(const Eigen::VectorXd& x_star,
                                                       const Eigen::VectorXd& spectrum);

    Eigen::MatrixXd sigma_;
};

// Columns v_i = sqrt(lambda_i) q_i of the top-r eigenpairs, so that V V^T is
// the best rank-r approximation.
struct LowRankFactor {
    Eigen::MatrixXd V;
    Eigen::VectorXd eigenvalues;  // nonincreasing, length r
    Eigen::MatrixXd eigenvectors; // q_i, largest-magnitude entry positive

    std::size_t rank() const noexcept { return static_cast<std::size_t>(V.cols()); }
};

// y_i = sqrt(beta) u_i x_star + z_i with column i drawn from stream (seed, i).
SampleMatrix sample_spiked(const SpikedModelParams& params, std::size_t n, std::uint64_t seed);

CovarianceEstimate empirical_covariance(const SampleMatrix& samples);

LowRankFactor low_rank_factor(const CovarianceEstimate& sigma, std::size_t r);

// Sigma = H diag(spectrum) H with H the Householder reflection mapping e_1 to
// x_star, so x_star is the principal eigenvector. Requires a positive,
// nonincreasing spectrum with spectrum[0] > spectrum[1].
CovarianceEstimate covariance_with_spectrum(const Eigen::VectorXd& x_star,
                                            const Eigen::VectorXd& spectrum);

// lambda_i = i^(-exponent), i = 1..p.
Eigen::VectorXd power_law_spectrum(std::size_t p, double exponent);

// Columns i.i.d. N(0, sigma) via the symmetric square root of sigma.
SampleMatrix gaussian_sampler(const CovarianceEstimate& sigma, std::size_t n, std::uint64_t seed);

}  // namespace pathpca
