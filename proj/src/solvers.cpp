#include "pathpca/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pathpca/errors.hpp"
#include "pathpca/rng.hpp"

namespace pathpca {

namespace {

void require_dimension(const CovarianceEstimate& sigma, const Dag& dag) {
    if (sigma.dimension() != dag.dimension())
        throw DimensionError("covariance is " + std::to_string(sigma.dimension()) + "x" +
                             std::to_string(sigma.dimension()) + " but graph binds " +
                             std::to_string(dag.dimension()) + " variables");
}

void require_config(const PowerMethodConfig& cfg) {
    if (cfg.max_iters < 1) throw UsageError("max_iters must be at least 1");
    if (!(cfg.tol > 0.0)) throw UsageError("tol must be positive");
}

Eigen::Index largest_diagonal(const Eigen::MatrixXd& m) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < m.rows(); ++i)
        if (m(i, i) > m(arg, arg)) arg = i;
    return arg;
}

Eigen::VectorXd start_vector(const CovarianceEstimate& sigma, const PowerMethodConfig& cfg) {
    const Eigen::Index p = static_cast<Eigen::Index>(sigma.dimension());
    switch (cfg.init) {
        case InitKind::diag_heuristic:
            return sigma.matrix().col(largest_diagonal(sigma.matrix()));
        case InitKind::given_vector:
            if (cfg.start.size() != p)
                throw DimensionError("start vector has length " + std::to_string(cfg.start.size()) +
                                     ", expected " + std::to_string(p));
            return cfg.start;
        case InitKind::random: {
            Stream stream(cfg.seed, 0);
            Eigen::VectorXd v(p);
            for (Eigen::Index i = 0; i < p; ++i) v[i] = stream.normal();
            return v;
        }
    }
    throw UsageError("unknown initialization");
}

}  // namespace

std::size_t budget_for_accuracy(double eps, std::size_t r, std::size_t p) {
    if (!(eps > 0.0)) throw UsageError("eps must be positive");
    const double budget =
        std::ceil(std::pow(2.0 / eps, static_cast<double>(r)) * std::log(static_cast<double>(p)));
    return std::max<std::size_t>(1, static_cast<std::size_t>(budget));
}

EstimateResult graph_truncated_power(const CovarianceEstimate& sigma, const Dag& dag,
                                     const PowerMethodConfig& cfg) {
    require_dimension(sigma, dag);
    require_config(cfg);
    const Eigen::MatrixXd& s = sigma.matrix();

    ProjectedVector x = project(dag, start_vector(sigma, cfg));
    Eigen::VectorXd w = s * x.x;
    double objective = x.x.dot(w);

    EstimateResult result;
    result.trace.push_back(objective);
    if (cfg.keep_iterates) result.iterates.push_back(x);
    ProjectedVector best = x;
    double best_objective = objective;

    std::size_t stable = 0;
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        ProjectedVector next = project(dag, w);
        Eigen::VectorXd next_w = s * next.x;
        const double next_objective = next.x.dot(next_w);
        result.trace.push_back(next_objective);
        if (cfg.keep_iterates) result.iterates.push_back(next);
        result.iterations_or_samples = it;
        if (next_objective > best_objective) {
            best = next;
            best_objective = next_objective;
        }

        const double step = (next.x - x.x).norm();
        stable = next.path.support == x.path.support ? stable + 1 : 0;
        const double change = std::abs(next_objective - objective);
        x = std::move(next);
        w = std::move(next_w);
        objective = next_objective;
        if (step <= cfg.tol) break;
        if (stable >= 2 && change <= cfg.tol) break;
    }

    result.x_hat = std::move(best);
    result.objective = best_objective;
    return result;
}

EstimateResult sample_and_project(const CovarianceEstimate& sigma, const Dag& dag,
                                  const SampleProjectConfig& cfg) {
    require_dimension(sigma, dag);
    if (cfg.budget < 1) throw UsageError("budget must be at least 1");
    const LowRankFactor factor = low_rank_factor(sigma, cfg.r);
    const Eigen::Index r = static_cast<Eigen::Index>(cfg.r);

    EstimateResult result;
    result.trace.reserve(cfg.budget);
    double best_score = -1.0;
    Eigen::VectorXd c(r);
    for (std::size_t i = 0; i < cfg.budget; ++i) {
        Stream stream(cfg.seed, i);
        double norm = 0.0;
        while (norm == 0.0) {
            for (Eigen::Index j = 0; j < r; ++j) c[j] = stream.normal();
            norm = c.norm();
        }
        // c and -c project to x and -x with the same score: fold onto the
        // half-sphere whose first nonzero coordinate is positive.
        for (Eigen::Index j = 0; j < r; ++j) {
            if (c[j] != 0.0) {
                if (c[j] < 0.0) c = -c;
                break;
            }
        }
        c /= norm;
        ProjectedVector candidate = project(dag, factor.V * c);
        const double score = (factor.V.transpose() * candidate.x).squaredNorm();
        if (score > best_score) {
            best_score = score;
            result.x_hat = std::move(candidate);
        }
        result.trace.push_back(best_score);
    }
    result.iterations_or_samples = cfg.budget;
    result.low_rank_objective = best_score;
    result.objective = result.x_hat.x.dot(sigma.matrix() * result.x_hat.x);
    return result;
}

EstimateResult brute_force_solve(const CovarianceEstimate& sigma, const Dag& dag,
                                 std::uint64_t cap) {
    require_dimension(sigma, dag);
    const Eigen::MatrixXd& s = sigma.matrix();

    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<VertexId> best_vertices;
    std::vector<std::size_t> support;
    Eigen::MatrixXd sub;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    std::size_t visited = 0;

    for_each_path(dag, cap, [&](std::span<const VertexId> vertices) {
        ++visited;
        support.clear();
        for (VertexId v : vertices)
            if (auto b = dag.binding(v)) support.push_back(*b);
        const Eigen::Index m = static_cast<Eigen::Index>(support.size());
        double value;
        if (m == 1) {
            value = s(support[0], support[0]);
        } else {
            sub.resize(m, m);
            for (Eigen::Index a = 0; a < m; ++a)
                for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = s(support[a], support[b]);
            solver.compute(sub, Eigen::EigenvaluesOnly);
            if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
            value = solver.eigenvalues()[m - 1];
        }
        if (value > best_value) {
            best_value = value;
            best_vertices.assign(vertices.begin(), vertices.end());
        }
    });

    EstimateResult result;
    result.x_hat.path = make_path(dag, std::move(best_vertices));
    const auto& best_support = result.x_hat.path.support;
    const Eigen::Index m = static_cast<Eigen::Index>(best_support.size());
    sub.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = s(best_support[a], best_support[b]);
    solver.compute(sub);
    if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
    Eigen::VectorXd q = solver.eigenvectors().col(m - 1);
    Eigen::Index peak = 0;
    q.cwiseAbs().maxCoeff(&peak);
    if (q[peak] < 0.0) q = -q;
    q.normalize();

    result.x_hat.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dag.dimension()));
    for (Eigen::Index a = 0; a < m; ++a) result.x_hat.x[best_support[a]] = q[a];
    result.objective = result.x_hat.x.dot(s * result.x_hat.x);
    result.iterations_or_samples = visited;
    return result;
}

Eigen::VectorXd truncate_top_k(const Eigen::VectorXd& w, std::size_t k) {
    const std::size_t p = static_cast<std::size_t>(w.size());
    if (k < 1 || k > p)
        throw UsageError("sparsity k = " + std::to_string(k) + " outside [1, " + std::to_string(p) + "]");
    if (!w.allFinite()) throw NumericError("cannot truncate a vector with non-finite entries");
    std::vector<std::size_t> index(p);
    std::iota(index.begin(), index.end(), 0);
    std::stable_sort(index.begin(), index.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(w[a]) > std::abs(w[b]);
    });
    index.resize(k);

    const double peak = w.cwiseAbs().maxCoeff();
    int exponent = 0;
    if (peak > 0.0) std::frexp(peak, &exponent);
    const double scale = std::ldexp(1.0, -exponent);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(w.size());
    double norm2 = 0.0;
    for (std::size_t i : index) {
        out[i] = w[i] * scale;
        norm2 += out[i] * out[i];
    }
    if (norm2 > 0.0) {
        out /= std::sqrt(norm2);
    } else {
        for (std::size_t i : index) out[i] = 1.0 / std::sqrt(static_cast<double>(k));
    }
    return out;
}

SparseEstimateResult sparse_truncated_power(const CovarianceEstimate& sigma, std::size_t k,
                                            const PowerMethodConfig& cfg) {
    require_config(cfg);
    const Eigen::MatrixXd& s = sigma.matrix();
    auto support_of = [](const Eigen::VectorXd& x) {
        std::vector<std::size_t> sup;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x[i] != 0.0) sup.push_back(static_cast<std::size_t>(i));
        return sup;
    };

    Eigen::VectorXd x = truncate_top_k(start_vector(sigma, cfg), k);
    Eigen::VectorXd w = s * x;
    double objective = x.dot(w);

    SparseEstimateResult result;
    result.trace.push_back(objective);
    Eigen::VectorXd best = x;
    double best_objective = objective;
    std::vector<std::size_t> support = support_of(x);

    std::size_t stable = 0;
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        Eigen::VectorXd next = truncate_top_k(w, k);
        Eigen::VectorXd next_w = s * next;
        const double next_objective = next.dot(next_w);
        result.trace.push_back(next_objective);
        result.iterations = it;
        if (next_objective > best_objective) {
            best = next;
            best_objective = next_objective;
        }
        const double step = (next - x).norm();
        std::vector<std::size_t> next_support = support_of(next);
        stable = next_support == support ? stable + 1 : 0;
        const double change = std::abs(next_objective - objective);
        x = std::move(next);
        w = std::move(next_w);
        support = std::move(next_support);
        objective = next_objective;
        if (step <= cfg.tol) break;
        if (stable >= 2 && change <= cfg.tol) break;
    }

    result.x = std::move(best);
    result.support = support_of(result.x);
    result.objective = best_objective;
    return result;
}

}  // namespace pathpca
