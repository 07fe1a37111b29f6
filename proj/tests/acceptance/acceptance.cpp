// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   pathpca_acceptance            run everything
//   pathpca_acceptance 4 7        run a subset (criterion 7 pulls in 4 and 6)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pathpca/errors.hpp"
#include "pathpca/grouping.hpp"
#include "pathpca/harness.hpp"
#include "pathpca/metrics.hpp"
#include "pathpca/projection.hpp"
#include "pathpca/solvers.hpp"
#include "test_support.hpp"

using namespace pathpca;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
}

// Largest eigenvalue of a symmetric 2x2 matrix, closed form.
double top_eigenvalue_2x2(double a, double b, double c) {
    const double mean = 0.5 * (a + c);
    const double half = 0.5 * (a - c);
    return mean + std::sqrt(half * half + b * b);
}

// Objective comparisons of one instance, shared between criteria 4-6 and 7.
struct DominanceLog {
    std::size_t instances = 0;
    std::size_t skipped = 0;
    std::size_t violations = 0;
    double worst = -std::numeric_limits<double>::infinity();  // max heuristic - brute

    void record(double brute, std::initializer_list<double> heuristics) {
        ++instances;
        for (double h : heuristics) {
            worst = std::max(worst, h - brute);
            if (h > brute + 1e-9) ++violations;
        }
    }
};

std::map<std::string, DominanceLog> dominance;

constexpr std::uint64_t kBruteCap = 100000;

// 1. Projection oracle equivalence on random DAGs.
Outcome criterion_1() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1001);
    Outcome out;
    double worst = 0.0;
    std::size_t infeasible = 0, checks = 0, max_paths = 0;
    for (int g = 0; g < 200; ++g) {
        const Dag dag = testing::random_dag(rng, 3, 40, 5000, 0);
        if (dag.dimension() > 40) throw InvariantError("generator exceeded p = 40");
        const auto paths = testing::oracle_paths(dag.description());
        max_paths = std::max(max_paths, paths.size());
        for (int rep = 0; rep < 5; ++rep) {
            const Eigen::VectorXd w = testing::gaussian_vector(rng, static_cast<Eigen::Index>(dag.dimension()));
            double best = -1.0;
            for (const auto& path : paths) {
                double total = 0.0;
                for (std::size_t i : testing::oracle_support(dag.description(), path)) total += w[i] * w[i];
                best = std::max(best, total);
            }
            const ProjectedVector x = project(dag, w);
            double attained = 0.0;
            for (std::size_t i : x.path.support) attained += w[i] * w[i];
            worst = std::max({worst, std::abs(attained - best), std::abs(w.dot(x.x) - std::sqrt(best))});
            if (!is_feasible(dag, x) || std::abs(x.x.norm() - 1.0) > 1e-12) ++infeasible;
            ++checks;
        }
    }
    const double elapsed = seconds_since(start);
    out.pass = worst <= 1e-10 && infeasible == 0 && elapsed < 30.0;
    out.detail = std::to_string(checks) + " projections, max |gap| " + fmt(worst) + ", " +
                 std::to_string(infeasible) + " infeasible, up to " + std::to_string(max_paths) +
                 " paths, " + fmt(elapsed, 3) + " s";
    return out;
}

// Streams through a buffer larger than the last-level cache so every timed
// projection starts from memory rather than from whatever the previous one left.
double evict_caches() {
    static std::vector<double> buffer(std::size_t{32} << 20, 1.0);
    double sum = 0.0;
    for (double& b : buffer) sum += (b += 1.0);
    return sum;
}

// 2. Projection time scales linearly on large layer graphs.
Outcome criterion_2() {
    const auto start = Clock::now();
    Outcome out;
    std::ostringstream detail;
    std::mt19937_64 rng(1002);
    volatile double sink = 0.0;
    const std::vector<std::size_t> sizes = {200000, 400000, 800000, 1600000};
    std::vector<Dag> graphs;
    std::vector<Eigen::VectorXd> weights;
    for (std::size_t p : sizes) {
        graphs.push_back(build_layer_graph({p, 2, 4}));
        weights.push_back(testing::gaussian_vector(rng, static_cast<Eigen::Index>(p)));
        project(graphs.back(), weights.back());  // warm-up
    }
    // Sizes are interleaved within each round so transient load hits all of
    // them alike; the minimum over rounds is the least disturbed measurement.
    std::vector<double> times(sizes.size(), std::numeric_limits<double>::infinity());
    for (int round = 0; round < 15; ++round)
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            sink = sink + evict_caches();
            const auto t0 = Clock::now();
            const ProjectedVector x = project(graphs[i], weights[i]);
            times[i] = std::min(times[i], seconds_since(t0));
            if (!is_feasible(graphs[i], x)) out.pass = false;
        }
    for (std::size_t i = 0; i < sizes.size(); ++i)
        detail << "p=" << sizes[i] << ": " << fmt(times[i] * 1e3, 3) << " ms; ";
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) worst_ratio = std::max(worst_ratio, times[i] / times[i - 1]);
    const double elapsed = seconds_since(start);
    out.pass = out.pass && worst_ratio <= 2.5 && elapsed < 60.0;
    detail << "worst doubling ratio " << fmt(worst_ratio, 3) << ", " << fmt(elapsed, 3) << " s";
    out.detail = detail.str();
    return out;
}

// 3. Power method traces are monotone and every iterate is feasible.
Outcome criterion_3() {
    std::mt19937_64 rng(1003);
    Outcome out;
    double worst_drop = 0.0;
    std::size_t iterates = 0, infeasible = 0;
    for (int t = 0; t < 100; ++t) {
        const Dag dag = testing::random_dag(rng, 4, 40, 5000, t % 3);
        const CovarianceEstimate sigma =
            testing::random_psd(rng, static_cast<Eigen::Index>(dag.dimension()), 2 + t % 20);
        PowerMethodConfig cfg;
        cfg.keep_iterates = true;
        cfg.init = t % 3 == 0 ? InitKind::random : InitKind::diag_heuristic;
        cfg.seed = static_cast<std::uint64_t>(t);
        const EstimateResult r = graph_truncated_power(sigma, dag, cfg);
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            worst_drop = std::max(worst_drop, r.trace[i - 1] - r.trace[i]);
        for (const ProjectedVector& x : r.iterates) {
            ++iterates;
            if (!is_feasible(dag, x)) ++infeasible;
        }
        if (!is_feasible(dag, r.x_hat)) ++infeasible;
    }
    out.pass = worst_drop <= 1e-10 && infeasible == 0;
    out.detail = std::to_string(iterates) + " iterates, largest objective drop " + fmt(worst_drop) + ", " +
                 std::to_string(infeasible) + " infeasible";
    return out;
}

SweepConfig layer_sweep(std::size_t p, std::size_t k, std::size_t d, std::vector<std::size_t> n_grid,
                        std::size_t trials, std::vector<SolverKind> solvers, std::uint64_t seed) {
    SweepConfig cfg;
    cfg.layer = {p, k, d};
    cfg.n_grid = std::move(n_grid);
    cfg.trials = trials;
    cfg.solvers = std::move(solvers);
    cfg.seed = seed;
    cfg.options.brute_cap = kBruteCap;
    return cfg;
}

const std::vector<std::size_t> kRecoveryGrid = {50, 200, 800, 3200};

SweepConfig recovery_config(std::vector<SolverKind> solvers) {
    SweepConfig cfg = layer_sweep(66, 4, 16, kRecoveryGrid, 100, std::move(solvers), 2024);
    cfg.model = {ModelKind::spiked, 1.0, 0.25};
    return cfg;
}

// 4. Exact recovery trend on the full bipartite (66, 4, 16) layer graph.
Outcome criterion_4() {
    const auto start = Clock::now();
    Outcome out;
    const SweepResult sweep = run_sweep(recovery_config({SolverKind::power}));
    const double elapsed = seconds_since(start);
    std::map<std::size_t, std::vector<double>> loss, jaccard;
    for (const ResultRecord& r : sweep.rows) {
        if (r.status != "ok") out.pass = false;
        loss[r.n].push_back(r.projector_loss);
        jaccard[r.n].push_back(r.jaccard);
    }
    std::ostringstream detail;
    detail << "median loss";
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t n : kRecoveryGrid) {
        const double m = median(loss[n]);
        detail << " n=" << n << ":" << fmt(m);
        if (!(m < previous)) out.pass = false;
        previous = m;
    }
    const double final_jaccard = median(jaccard[kRecoveryGrid.back()]);
    if (!(final_jaccard <= 0.1)) out.pass = false;
    if (elapsed >= 300.0) out.pass = false;
    detail << "; median Jaccard at n=" << kRecoveryGrid.back() << ": " << fmt(final_jaccard) << ", "
           << fmt(elapsed, 3) << " s";
    out.detail = detail.str();
    return out;
}

// 5. Structured estimates beat the k-sparse baseline under a power-law spectrum.
Outcome criterion_5() {
    const auto start = Clock::now();
    Outcome out;
    // 200 interior variables in 10 layers of 20, plus S and T.
    const Dag dag = build_layer_graph({202, 10, 5});
    const ModelSpec model{ModelKind::spectrum, 1.0, 0.25};
    std::vector<double> power_loss, sparse_loss;
    std::size_t off_path = 0, baseline_not_path = 0, structured_wins = 0;
    for (std::size_t trial = 0; trial < 100; ++trial) {
        const std::uint64_t seed = cell_seed(2025, trial, 400);
        const GeneratedInstance inst = generate_instance(dag, model, 400, seed);
        const CovarianceEstimate sigma = empirical_covariance(inst.samples);
        PowerMethodConfig cfg;
        const EstimateResult power = graph_truncated_power(sigma, dag, cfg);
        const SparseEstimateResult sparse = sparse_truncated_power(sigma, inst.path.support.size(), cfg);
        if (!is_feasible(dag, power.x_hat)) ++off_path;
        // With the canonical binding a support is a path support iff its
        // ascending vertex sequence is an S-T path.
        if (!is_st_path(dag, sparse.support)) ++baseline_not_path;
        power_loss.push_back(projector_distance(power.x_hat.x, inst.x_star));
        sparse_loss.push_back(projector_distance(sparse.x, inst.x_star));
        structured_wins += power_loss.back() < sparse_loss.back();
    }
    const double elapsed = seconds_since(start);
    const double mp = median(power_loss), ms = median(sparse_loss);
    out.pass = mp <= ms && off_path == 0 && elapsed < 300.0;
    const PathCount count = count_paths(dag);
    dominance["5"].skipped = 100;
    out.detail = "median loss power " + fmt(mp, 7) + " vs sparse-power " + fmt(ms, 7) + ", power lower in " +
                 std::to_string(structured_wins) + "/100 trials; structured off-path " +
                 std::to_string(off_path) + "/100, baseline supports that are not paths " +
                 std::to_string(baseline_not_path) + "/100; " + std::to_string(count.count) +
                 " paths (brute force skipped); " + fmt(elapsed, 3) + " s";
    return out;
}

// 6. Sample-and-project quality, and the r = 1 identity.
Outcome criterion_6() {
    std::mt19937_64 rng(1006);
    Outcome out;
    double worst_ratio = std::numeric_limits<double>::infinity();
    std::size_t r1_mismatch = 0;
    DominanceLog& log = dominance["6"];
    for (int t = 0; t < 50; ++t) {
        const Dag dag = testing::random_dag(rng, 6, 30, 200, t % 2);
        const auto p = static_cast<Eigen::Index>(dag.dimension());
        const CovarianceEstimate sigma = testing::random_psd(rng, p, 3 + t % 8);
        const EstimateResult r = sample_and_project(sigma, dag, {2, 2000, static_cast<std::uint64_t>(t)});
        const LowRankFactor f = low_rank_factor(sigma, 2);

        double optimum = 0.0;
        for (const auto& path : testing::oracle_paths(dag.description())) {
            double a = 0.0, b = 0.0, c = 0.0;
            for (std::size_t i : testing::oracle_support(dag.description(), path)) {
                a += f.V(i, 0) * f.V(i, 0);
                b += f.V(i, 0) * f.V(i, 1);
                c += f.V(i, 1) * f.V(i, 1);
            }
            optimum = std::max(optimum, top_eigenvalue_2x2(a, b, c));
        }
        const double achieved = (f.V.transpose() * r.x_hat.x).squaredNorm();
        worst_ratio = std::min(worst_ratio, optimum > 0.0 ? achieved / optimum : 1.0);

        const ProjectedVector v1 = project(dag, low_rank_factor(sigma, 1).V.col(0));
        for (std::size_t budget : {1u, 10u, 500u}) {
            const EstimateResult one = sample_and_project(sigma, dag, {1, budget, static_cast<std::uint64_t>(t) + 7});
            if (!(one.x_hat.x == v1.x) || !(one.x_hat.path == v1.path)) ++r1_mismatch;
        }

        const EstimateResult brute = brute_force_solve(sigma, dag, kBruteCap);
        const EstimateResult power = graph_truncated_power(sigma, dag);
        log.record(brute.objective, {power.objective, r.objective});
    }
    out.pass = worst_ratio >= 0.95 && r1_mismatch == 0;
    out.detail = "worst rank-2 ratio " + fmt(worst_ratio, 6) + " (need >= 0.95), r=1 mismatches " +
                 std::to_string(r1_mismatch) + "/150";
    return out;
}

// 7. Brute force dominates both heuristics wherever enumeration is feasible.
Outcome criterion_7() {
    const auto start = Clock::now();
    // Criterion 4 instances, all three solvers on each cell.
    SweepConfig cfg = recovery_config({SolverKind::power, SolverKind::sample, SolverKind::brute});
    const Dag dag = sweep_graph(cfg);
    DominanceLog& log4 = dominance["4"];
    for (std::size_t trial = 0; trial < cfg.trials; ++trial)
        for (std::size_t n : cfg.n_grid) {
            const auto rows = run_cell(cfg, dag, trial, n);
            if (rows.size() != 3 || rows[2].status != "ok") {
                ++log4.skipped;
                continue;
            }
            log4.record(rows[2].objective, {rows[0].objective, rows[1].objective});
        }

    Outcome out;
    std::ostringstream detail;
    for (const auto& [name, log] : dominance) {
        detail << "crit " << name << ": " << log.instances << " checked, " << log.skipped << " infeasible";
        if (log.instances) detail << ", max excess " << fmt(log.worst);
        detail << "; ";
        if (log.violations) out.pass = false;
    }
    if (dominance["4"].instances == 0 || dominance["6"].instances == 0) out.pass = false;
    detail << fmt(seconds_since(start), 3) << " s";
    out.detail = detail.str();
    return out;
}

// 8. Group graphs: one nonzero per group, path count = product of group sizes.
Outcome criterion_8() {
    std::mt19937_64 rng(1008);
    Outcome out;
    std::size_t count_mismatch = 0, bad_outputs = 0, outputs = 0, brute_runs = 0;
    for (int t = 0; t < 20; ++t) {
        std::uniform_int_distribution<std::size_t> groups(3, 10), size(2, 30);
        const std::size_t g = groups(rng);
        std::vector<std::size_t> label_of;
        std::vector<std::size_t> sizes(g);
        for (std::size_t i = 0; i < g; ++i) {
            sizes[i] = size(rng);
            for (std::size_t j = 0; j < sizes[i]; ++j) label_of.push_back(i);
        }
        std::shuffle(label_of.begin(), label_of.end(), rng);
        std::ostringstream text;
        for (std::size_t v = 0; v < label_of.size(); ++v) text << v << " sector" << label_of[v] << '\n';
        std::istringstream in(text.str());
        const GroupingSpec spec = parse_grouping(in, "grouping");
        const Dag dag = build_group_graph(spec);

        std::uint64_t product = 1;
        for (std::size_t s : sizes) product *= s;
        const PathCount count = count_paths(dag);
        if (count.saturated || count.count != product) ++count_mismatch;

        const GeneratedInstance inst = generate_instance(dag, {ModelKind::spiked, 2.0, 0.25}, 200,
                                                         static_cast<std::uint64_t>(t));
        const CovarianceEstimate sigma = empirical_covariance(inst.samples);
        std::vector<Eigen::VectorXd> xs = {graph_truncated_power(sigma, dag).x_hat.x,
                                           sample_and_project(sigma, dag, {2, 500, 1}).x_hat.x};
        if (product <= kBruteCap) {
            xs.push_back(brute_force_solve(sigma, dag, kBruteCap).x_hat.x);
            ++brute_runs;
        }
        for (const Eigen::VectorXd& x : xs) {
            ++outputs;
            for (const auto& members : spec.members) {
                std::size_t nonzero = 0;
                for (std::size_t v : members) nonzero += x[static_cast<Eigen::Index>(v)] != 0.0;
                if (nonzero != 1) {
                    ++bad_outputs;
                    break;
                }
            }
        }
    }
    out.pass = count_mismatch == 0 && bad_outputs == 0;
    out.detail = "20 groupings, " + std::to_string(count_mismatch) + " path-count mismatches, " +
                 std::to_string(bad_outputs) + "/" + std::to_string(outputs) +
                 " outputs violating one-per-group (brute force on " + std::to_string(brute_runs) + ")";
    return out;
}

// 9. Median loss collapses onto one curve against n / (ln((p-2)/k) + k ln d).
Outcome criterion_9() {
    const auto start = Clock::now();
    Outcome out;
    const std::vector<double> abscissae = {4, 8, 16, 32, 64, 128};
    const std::vector<std::size_t> sizes = {34, 66, 130};
    std::map<double, std::vector<double>> medians;
    for (std::size_t p : sizes) {
        const std::size_t k = 4, d = (p - 2) / k;
        const double complexity = std::log(static_cast<double>(p - 2) / k) + k * std::log(static_cast<double>(d));
        for (double t : abscissae) {
            const auto n = static_cast<std::size_t>(std::lround(t * complexity));
            SweepConfig cfg = layer_sweep(p, k, d, {n}, 100, {SolverKind::power}, 2026);
            const Dag dag = sweep_graph(cfg);
            std::vector<double> loss;
            for (std::size_t trial = 0; trial < cfg.trials; ++trial)
                loss.push_back(run_cell(cfg, dag, trial, n)[0].projector_loss);
            medians[t].push_back(median(loss));
        }
    }
    std::ostringstream detail;
    double worst = 0.0;
    for (double t : abscissae) {
        const auto [lo, hi] = std::minmax_element(medians[t].begin(), medians[t].end());
        const double ratio = *hi / *lo;
        worst = std::max(worst, ratio);
        detail << "t=" << t << " ratio " << fmt(ratio, 3) << "; ";
    }
    out.pass = worst <= 2.0;
    detail << "worst " << fmt(worst, 3) << ", " << fmt(seconds_since(start), 3) << " s";
    out.detail = detail.str();
    return out;
}

// 10. Sweep CSVs are byte-identical across reruns.
Outcome criterion_10() {
    std::vector<SweepConfig> configs;
    configs.push_back(layer_sweep(34, 4, 8, {40, 160}, 5,
                                  {SolverKind::power, SolverKind::sample, SolverKind::brute, SolverKind::sparse_power}, 7));
    SweepConfig spectrum = layer_sweep(52, 5, 3, {100}, 4, {SolverKind::power, SolverKind::sparse_power}, 8);
    spectrum.model = {ModelKind::spectrum, 1.0, 0.25};
    configs.push_back(spectrum);
    SweepConfig autos = layer_sweep(66, 0, 0, {50, 200}, 3, {SolverKind::power, SolverKind::sample}, 9);
    autos.k_auto = autos.d_auto = true;
    configs.push_back(autos);

    Outcome out;
    std::size_t identical = 0;
    for (const SweepConfig& cfg : configs) {
        const SweepResult a = run_sweep(cfg), b = run_sweep(cfg);
        if (a.csv == b.csv && a.sidecar.dump() == b.sidecar.dump()) ++identical;
    }
    out.pass = identical == configs.size();
    out.detail = std::to_string(identical) + "/" + std::to_string(configs.size()) +
                 " configurations reproduced byte for byte";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 projection oracle equivalence", criterion_1},
        {"2 linear-time projection", criterion_2},
        {"3 power method monotonicity and feasibility", criterion_3},
        {"4 exact recovery trend", criterion_4},
        {"5 structured vs sparse ordering", criterion_5},
        {"6 sample-and-project quality", criterion_6},
        {"7 brute-force dominance", criterion_7},
        {"8 group-graph contract", criterion_8},
        {"9 scaling-law collapse", criterion_9},
        {"10 sweep determinism", criterion_10},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    if (selected.count(7)) selected.insert(6);

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected.empty() && !selected.count(static_cast<int>(i + 1))) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return failures ? 1 : 0;
}
