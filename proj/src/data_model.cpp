#include "pathpca/data_model.hpp"

#include <cmath>

#include "pathpca/errors.hpp"
#include "pathpca/rng.hpp"

namespace pathpca {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd s = (m + m.transpose()) * 0.5;
    return s;
}

// Flips q so that its largest-magnitude entry (first one on ties) is positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> q) {
    Eigen::Index arg = 0;
    double peak = -1.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (std::abs(q[i]) > peak) {
            peak = std::abs(q[i]);
            arg = i;
        }
    }
    if (q.size() && q[arg] < 0.0) q = -q;
}

void require_unit(const Eigen::VectorXd& x, const char* what) {
    if (!x.allFinite() || std::abs(x.norm() - 1.0) > 1e-12)
        throw NumericError(std::string(what) + " must be a finite unit vector (norm " +
                           std::to_string(x.norm()) + ")");
}

}  // namespace

CovarianceEstimate CovarianceEstimate::from_matrix(Eigen::MatrixXd m) {
    if (m.rows() != m.cols())
        throw NumericError("covariance must be square, got " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()));
    if (!m.allFinite()) throw NumericError("covariance has non-finite entries");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NumericError("covariance is not symmetric");
    Eigen::MatrixXd s = symmetrized(m);
    if (s.rows() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
        const Eigen::VectorXd& ev = solver.eigenvalues();
        const double norm = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
        if (ev[0] < -1e-8 * norm)
            throw NumericError("covariance is not positive semidefinite (smallest eigenvalue " +
                               std::to_string(ev[0]) + ")");
    }
    return CovarianceEstimate(std::move(s));
}

SampleMatrix sample_spiked(const SpikedModelParams& params, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw UsageError("sample count must be at least 1");
    if (!(params.beta >= 0.0) || !std::isfinite(params.beta))
        throw UsageError("beta must be finite and nonnegative");
    require_unit(params.x_star, "x_star");
    const Eigen::Index p = params.x_star.size();
    const double amplitude = std::sqrt(params.beta);
    SampleMatrix out{Eigen::MatrixXd(p, static_cast<Eigen::Index>(n))};
    for (std::size_t i = 0; i < n; ++i) {
        Stream stream(seed, i);
        const double u = stream.normal();
        auto column = out.Y.col(static_cast<Eigen::Index>(i));
        for (Eigen::Index j = 0; j < p; ++j) column[j] = stream.normal();
        column += (amplitude * u) * params.x_star;
    }
    return out;
}

CovarianceEstimate empirical_covariance(const SampleMatrix& samples) {
    if (samples.n() < 1) throw UsageError("need at least one observation");
    if (!samples.Y.allFinite()) throw NumericError("sample matrix has non-finite entries");
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(samples.Y.rows(), samples.Y.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(samples.Y, 1.0 / static_cast<double>(samples.n()));
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return CovarianceEstimate(std::move(gram));
}

LowRankFactor low_rank_factor(const CovarianceEstimate& sigma, std::size_t r) {
    const std::size_t p = sigma.dimension();
    if (r < 1 || r > p)
        throw UsageError("rank r = " + std::to_string(r) + " outside [1, " + std::to_string(p) + "]");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma.matrix());
    if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");

    const Eigen::VectorXd& values = solver.eigenvalues();
    const double norm = std::max(std::abs(values[0]), std::abs(values[p - 1]));
    LowRankFactor out;
    out.V.resize(p, r);
    out.eigenvalues.resize(r);
    out.eigenvectors.resize(p, r);
    for (std::size_t i = 0; i < r; ++i) {
        const Eigen::Index src = static_cast<Eigen::Index>(p - 1 - i);
        double lambda = values[src];
        if (lambda < -1e-8 * norm)
            throw NumericError("eigenvalue " + std::to_string(i + 1) + " is negative");
        lambda = std::max(lambda, 0.0);
        out.eigenvectors.col(i) = solver.eigenvectors().col(src);
        fix_sign(out.eigenvectors.col(i));
        out.eigenvalues[i] = lambda;
        out.V.col(i) = std::sqrt(lambda) * out.eigenvectors.col(i);
    }
    return out;
}

CovarianceEstimate covariance_with_spectrum(const Eigen::VectorXd& x_star,
                                            const Eigen::VectorXd& spectrum) {
    const Eigen::Index p = x_star.size();
    if (p < 1) throw UsageError("x_star is empty");
    if (spectrum.size() != p)
        throw DimensionError("spectrum has length " + std::to_string(spectrum.size()) +
                             ", x_star has length " + std::to_string(p));
    if (!x_star.allFinite()) throw NumericError("x_star has non-finite entries");
    const double norm = x_star.norm();
    if (norm == 0.0) throw NumericError("x_star is zero");
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!(spectrum[i] > 0.0) || !std::isfinite(spectrum[i]))
            throw UsageError("spectrum entries must be positive and finite");
        if (i > 0 && spectrum[i] > spectrum[i - 1])
            throw UsageError("spectrum must be nonincreasing");
    }
    if (p > 1 && !(spectrum[0] > spectrum[1]))
        throw UsageError("spectrum needs an eigengap: spectrum[0] > spectrum[1]");

    const Eigen::VectorXd x = x_star / norm;
    Eigen::VectorXd u = -x;
    u[0] += 1.0;
    const double uu = u.squaredNorm();
    // Sigma = H diag(spectrum) H with H = I - 2 u u^T / (u^T u).
    Eigen::MatrixXd sigma = spectrum.asDiagonal();
    if (uu > 0.0) {
        const Eigen::VectorXd lu = spectrum.cwiseProduct(u);
        const double ulu = u.dot(lu);
        const double c = 2.0 / uu;
        sigma.noalias() -= c * (lu * u.transpose() + u * lu.transpose());
        sigma.noalias() += (c * c * ulu) * (u * u.transpose());
    }
    return CovarianceEstimate(symmetrized(sigma));
}

Eigen::VectorXd power_law_spectrum(std::size_t p, double exponent) {
    Eigen::VectorXd out(p);
    for (std::size_t i = 0; i < p; ++i) out[i] = std::pow(static_cast<double>(i + 1), -exponent);
    return out;
}

SampleMatrix gaussian_sampler(const CovarianceEstimate& sigma, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw UsageError("sample count must be at least 1");
    const Eigen::Index p = static_cast<Eigen::Index>(sigma.dimension());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma.matrix());
    if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
    const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd root =
        solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();

    Eigen::MatrixXd z(p, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        Stream stream(seed, i);
        for (Eigen::Index j = 0; j < p; ++j) z(j, static_cast<Eigen::Index>(i)) = stream.normal();
    }
    return SampleMatrix{root * z};
}

}  // namespace pathpca
