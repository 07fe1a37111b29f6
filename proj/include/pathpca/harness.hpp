#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pathpca/data_model.hpp"
#include "pathpca/graph.hpp"
#include "pathpca/io.hpp"
#include "pathpca/rng.hpp"
#include "pathpca/solvers.hpp"

namespace pathpca {

// S-T path drawn uniformly among all S-T paths.
Path sample_uniform_path(const Dag& dag, Stream& stream);

enum class ModelKind {
    spiked,    // I + beta x* x*^T
    spectrum,  // principal eigenvector x*, eigenvalues i^(-exponent)
};

struct ModelSpec {
    ModelKind kind = ModelKind::spiked;
    double beta = 1.0;
    double exponent = 0.25;
};

struct GeneratedInstance {
    Path path;
    Eigen::VectorXd x_star;
    SampleMatrix samples;
};

// Uniform random path, Gaussian values on its bound variables scaled to unit
// length, then n samples from the model. Stream layout under `seed`: index 0
// for the signal, derive_seed(seed, 1) for the samples.
GeneratedInstance generate_instance(const Dag& dag, const ModelSpec& model, std::size_t n,
                                    std::uint64_t seed);

enum class SolverKind { power, sample, brute, sparse_power };

SolverKind parse_solver(const std::string& name);
std::string solver_name(SolverKind kind);

struct SolverOptions {
    PowerMethodConfig power;
    SampleProjectConfig sample;
    std::uint64_t brute_cap = 100000;
    // Sparsity of the sparse-power baseline; 0 means "size of the signal support".
    std::size_t sparse_k = 0;
};

struct SolverOutput {
    Eigen::VectorXd x;
    std::optional<ProjectedVector> structured;  // set by the graph-constrained solvers
    double objective = 0.0;
    std::size_t iterations = 0;
};

SolverOutput run_solver(SolverKind kind, const CovarianceEstimate& sigma, const Dag& dag,
                        const SolverOptions& options);

// Throws InvariantError unless a structured output lies in the feasible set.
void verify_structured_output(const Dag& dag, const SolverOutput& output);

// Divisor of p - 2 closest to ln p (smaller one on ties).
std::size_t nearest_layer_count(std::size_t p);

struct SweepConfig {
    std::optional<std::string> graph_file;  // otherwise a layer graph
    LayerGraphSpec layer;
    bool k_auto = false;
    bool d_auto = false;
    ModelSpec model;
    std::vector<std::size_t> n_grid;
    std::size_t trials = 1;
    std::vector<SolverKind> solvers;
    SolverOptions options;
    std::uint64_t seed = 1;
    double zero_tol = 1e-12;
    bool record_timing = false;
    std::string out;
};

// Reads the declarative key-value schema documented in the README. Throws
// ParseError (with line) or UsageError.
SweepConfig parse_sweep_config(const io::KeyValueConfig& cfg);

struct ResultRecord {
    std::size_t trial = 0;
    std::size_t n = 0;
    std::string solver;
    double projector_loss = 0.0;
    double jaccard = 0.0;
    double objective = 0.0;
    double wall_time = 0.0;  // seconds
    std::uint64_t seed = 0;
    std::string status = "ok";
};

// Seed of cell (trial, n) under the master seed.
std::uint64_t cell_seed(std::uint64_t master, std::size_t trial, std::size_t n);

// Graph the sweep runs on, with k and d resolved.
Dag sweep_graph(SweepConfig& cfg);

// One (trial, n) cell: all configured solvers on a fresh instance.
std::vector<ResultRecord> run_cell(const SweepConfig& cfg, const Dag& dag, std::size_t trial,
                                   std::size_t n);

struct SweepResult {
    std::vector<ResultRecord> rows;
    std::string csv;
    nlohmann::json sidecar;
};

// Rows ordered by (trial, n, solver) in configuration order. The CSV is a
// pure function of the configuration unless record_timing is set.
SweepResult run_sweep(SweepConfig cfg);

}  // namespace pathpca
