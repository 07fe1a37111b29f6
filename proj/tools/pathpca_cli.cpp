// pathpca: PCA with the support constrained to an S-T path of a DAG.
//
// Subcommands: validate, generate, solve, sweep, project, group-graph.
// Exit codes: 0 ok, 2 usage, 3 parse/input, 4 numeric failure,
// 5 internal invariant violation.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pathpca/data_model.hpp"
#include "pathpca/errors.hpp"
#include "pathpca/graph.hpp"
#include "pathpca/grouping.hpp"
#include "pathpca/harness.hpp"
#include "pathpca/io.hpp"
#include "pathpca/metrics.hpp"
#include "pathpca/projection.hpp"
#include "pathpca/solvers.hpp"

namespace fs = std::filesystem;
using namespace pathpca;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kParse = 3, kNumeric = 4, kInternal = 5 };

struct GraphOptions {
    std::string graph;
    std::size_t p = 0, k = 0, d = 0;
};

Dag load_graph(const GraphOptions& opts) {
    if (!opts.graph.empty()) return Dag::build(io::read_graph_file(opts.graph));
    if (opts.p == 0) throw UsageError("pass --graph or a layer spec (--p, --k, --d)");
    LayerGraphSpec spec{opts.p, opts.k, opts.d};
    if (spec.k == 0) spec.k = nearest_layer_count(spec.p);
    if (spec.d == 0) spec.d = spec.layer_size();
    return build_layer_graph(spec);
}

int cmd_validate(const std::string& path) {
    const GraphDescription g = io::read_graph_file(path);
    const ValidationReport report = validate(g);
    if (report.ok()) {
        const Dag dag = Dag::build(g);
        const PathCount count = count_paths(dag);
        std::cout << "ok: " << dag.vertex_count() << " vertices, " << dag.edge_count() << " edges, "
                  << dag.dimension() << " variables, "
                  << (count.saturated ? std::string(">= 2^64") : std::to_string(count.count))
                  << " S-T paths\n";
        return kOk;
    }
    for (const auto& v : report.violations) std::cout << "violation: " << v << '\n';
    return kParse;
}

struct GenerateOptions {
    GraphOptions graph;
    std::string model = "spiked";
    double beta = 1.0;
    double exponent = 0.25;
    std::size_t n = 100;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_generate(const GenerateOptions& opts) {
    const Dag dag = load_graph(opts.graph);
    ModelSpec model;
    if (opts.model == "spiked") model.kind = ModelKind::spiked;
    else if (opts.model == "spectrum") model.kind = ModelKind::spectrum;
    else throw UsageError("--model must be spiked or spectrum");
    model.beta = opts.beta;
    model.exponent = opts.exponent;

    const GeneratedInstance instance = generate_instance(dag, model, opts.n, opts.seed);
    fs::create_directories(opts.out);
    const fs::path dir(opts.out);
    io::write_graph_file((dir / "graph.txt").string(), dag);
    io::write_vector_file((dir / "xstar.txt").string(), instance.x_star);
    io::write_csv_matrix_file((dir / "samples.csv").string(), instance.samples.Y);

    const Eigen::Index p = instance.x_star.size();
    const CovarianceEstimate population =
        model.kind == ModelKind::spiked
            ? CovarianceEstimate::from_matrix(Eigen::MatrixXd::Identity(p, p) +
                                              model.beta * instance.x_star * instance.x_star.transpose())
            : covariance_with_spectrum(instance.x_star, power_law_spectrum(p, model.exponent));
    io::write_covariance_file((dir / "population.json").string(), population);

    std::cout << "wrote " << (dir / "graph.txt").string() << ", xstar.txt, samples.csv, population.json"
              << " (path:";
    for (VertexId v : instance.path.vertices) std::cout << ' ' << v;
    std::cout << ")\n";
    return kOk;
}

struct SolveOptions {
    GraphOptions graph;
    std::string data, covariance, xstar, out, record;
    bool header = false;
    std::string solver = "power";
    std::string init = "diag";
    std::size_t rank = 2, budget = 1000, max_iters = 1000, sparse_k = 0;
    double tol = 1e-9;
    std::uint64_t cap = 100000;
    std::uint64_t seed = 1;
};

int cmd_solve(const SolveOptions& opts) {
    if (opts.data.empty() == opts.covariance.empty())
        throw UsageError("pass exactly one of --data and --covariance");
    const SolverKind kind = parse_solver(opts.solver);
    if (opts.init != "diag" && opts.init != "random") throw UsageError("--init must be diag or random");
    const Dag dag = load_graph(opts.graph);
    const CovarianceEstimate sigma =
        opts.data.empty() ? io::read_covariance_file(opts.covariance)
                          : empirical_covariance(SampleMatrix{io::read_csv_matrix(opts.data, opts.header)});
    if (sigma.dimension() != dag.dimension())
        throw DimensionError("data has " + std::to_string(sigma.dimension()) + " variables, graph binds " +
                             std::to_string(dag.dimension()));

    std::optional<Eigen::VectorXd> x_star;
    if (!opts.xstar.empty()) {
        x_star = io::read_vector_file(opts.xstar);
        if (static_cast<std::size_t>(x_star->size()) != dag.dimension())
            throw DimensionError("x* has length " + std::to_string(x_star->size()) + ", expected " +
                                 std::to_string(dag.dimension()));
    }

    SolverOptions options;
    options.power.max_iters = opts.max_iters;
    options.power.tol = opts.tol;
    options.power.seed = opts.seed;
    if (opts.init == "random") options.power.init = InitKind::random;
    options.sample = {opts.rank, opts.budget, opts.seed};
    options.brute_cap = opts.cap;
    options.sparse_k = opts.sparse_k;
    if (options.sparse_k == 0 && x_star)
        options.sparse_k = static_cast<std::size_t>((x_star->array() != 0.0).count());

    const auto start = std::chrono::steady_clock::now();
    const SolverOutput output = run_solver(kind, sigma, dag, options);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    verify_structured_output(dag, output);

    nlohmann::json record = {{"solver", solver_name(kind)},
                             {"objective", output.objective},
                             {"iterations", output.iterations},
                             {"seed", opts.seed},
                             {"wall_time", elapsed}};
    if (output.structured) {
        record["path"] = output.structured->path.vertices;
        record["support"] = output.structured->path.support;
        record["degenerate"] = output.structured->degenerate;
    } else {
        std::vector<std::size_t> support;
        for (Eigen::Index i = 0; i < output.x.size(); ++i)
            if (output.x[i] != 0.0) support.push_back(static_cast<std::size_t>(i));
        record["support"] = support;
    }
    if (x_star) {
        record["projector_loss"] = projector_distance(output.x, *x_star);
        record["jaccard"] = support_jaccard(output.x, *x_star);
    }

    if (!opts.out.empty()) {
        if (output.structured) io::write_estimate_file(opts.out, *output.structured);
        else io::write_vector_file(opts.out, output.x);
        io::write_text_file(opts.record.empty() ? opts.out + ".json" : opts.record, record.dump(2) + "\n");
    }
    std::cout << record.dump(2) << '\n';
    return kOk;
}

int cmd_sweep(const std::string& config_path, std::optional<std::uint64_t> seed, std::string out) {
    SweepConfig cfg = parse_sweep_config(io::read_key_value_file(config_path));
    if (seed) cfg.seed = *seed;
    if (!out.empty()) cfg.out = out;
    const SweepResult result = run_sweep(cfg);
    if (cfg.out.empty()) {
        std::cout << result.csv;
    } else {
        io::write_text_file(cfg.out, result.csv);
        io::write_text_file(cfg.out + ".json", result.sidecar.dump(2) + "\n");
        std::cout << "wrote " << result.rows.size() << " rows to " << cfg.out << '\n';
    }
    return kOk;
}

int cmd_project(const GraphOptions& graph, const std::string& vector, const std::string& out) {
    const Dag dag = load_graph(graph);
    const Eigen::VectorXd w = io::read_vector_file(vector);
    const ProjectedVector x = project(dag, w);
    if (!is_feasible(dag, x, 1e-9)) throw InvariantError("projection left the feasible set");
    if (!out.empty()) io::write_estimate_file(out, x);
    std::cout << "path:";
    for (VertexId v : x.path.vertices) std::cout << ' ' << v;
    std::cout << "\nsupport:";
    for (std::size_t i : x.path.support) std::cout << ' ' << i;
    std::cout << '\n';
    if (out.empty()) io::write_vector(std::cout, x.x);
    return kOk;
}

int cmd_group_graph(const std::string& grouping, const std::string& out) {
    const Dag dag = build_group_graph(read_grouping_file(grouping));
    if (out.empty()) io::write_graph(std::cout, dag);
    else io::write_graph_file(out, dag);
    return kOk;
}

void add_graph_options(CLI::App* cmd, GraphOptions& opts) {
    cmd->add_option("--graph", opts.graph, "Graph file");
    cmd->add_option("--p", opts.p, "Layer graph: total vertex count");
    cmd->add_option("--k", opts.k, "Layer graph: layer count (default: divisor of p-2 nearest ln p)");
    cmd->add_option("--d", opts.d, "Layer graph: out-degree (default: full bipartite)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PCA with the principal component supported on an S-T path of a DAG"};
    app.require_subcommand(1);

    std::string validate_graph;
    auto* validate_cmd = app.add_subcommand("validate", "Check a graph file against the DAG invariants");
    validate_cmd->add_option("--graph", validate_graph, "Graph file")->required();

    GenerateOptions gen;
    auto* generate_cmd = app.add_subcommand("generate", "Write a graph, a path signal and samples");
    add_graph_options(generate_cmd, gen.graph);
    generate_cmd->add_option("--model", gen.model, "spiked or spectrum");
    generate_cmd->add_option("--beta", gen.beta, "Spike strength");
    generate_cmd->add_option("--exponent", gen.exponent, "Spectrum decay i^(-exponent)");
    generate_cmd->add_option("--n", gen.n, "Sample count");
    generate_cmd->add_option("--seed", gen.seed, "Seed");
    generate_cmd->add_option("--out", gen.out, "Output directory")->required();

    SolveOptions solve;
    auto* solve_cmd = app.add_subcommand("solve", "Estimate a path-supported principal component");
    add_graph_options(solve_cmd, solve.graph);
    solve_cmd->add_option("--data", solve.data, "Sample CSV (rows = variables)");
    solve_cmd->add_flag("--header", solve.header, "Sample CSV has a header row");
    solve_cmd->add_option("--covariance", solve.covariance, "Covariance JSON");
    solve_cmd->add_option("--solver", solve.solver, "power | sample | brute | sparse-power");
    solve_cmd->add_option("--rank", solve.rank, "Sample-and-project rank");
    solve_cmd->add_option("--budget", solve.budget, "Sample-and-project sample count");
    solve_cmd->add_option("--max-iters", solve.max_iters, "Power method iteration cap");
    solve_cmd->add_option("--tol", solve.tol, "Power method tolerance");
    solve_cmd->add_option("--init", solve.init, "Power method start: diag or random");
    solve_cmd->add_option("--cap", solve.cap, "Path cap for brute force");
    solve_cmd->add_option("--sparse-k", solve.sparse_k, "Sparsity for sparse-power");
    solve_cmd->add_option("--seed", solve.seed, "Seed");
    solve_cmd->add_option("--xstar", solve.xstar, "True signal, for metrics");
    solve_cmd->add_option("--out", solve.out, "Estimate file (record goes to <out>.json)");
    solve_cmd->add_option("--record", solve.record, "JSON record path");

    std::string sweep_config, sweep_out;
    std::optional<std::uint64_t> sweep_seed;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a seeded experiment sweep");
    sweep_cmd->add_option("--config", sweep_config, "Key-value sweep configuration")->required();
    sweep_cmd->add_option("--seed", sweep_seed, "Override the master seed");
    sweep_cmd->add_option("--out", sweep_out, "Results CSV (sidecar at <out>.json)");

    GraphOptions project_graph;
    std::string project_vector, project_out;
    auto* project_cmd = app.add_subcommand("project", "Project a vector onto the path-supported unit vectors");
    add_graph_options(project_cmd, project_graph);
    project_cmd->add_option("--vector", project_vector, "Vector file")->required();
    project_cmd->add_option("--out", project_out, "Estimate file");

    std::string grouping_file, grouping_out;
    auto* group_cmd = app.add_subcommand("group-graph", "Build the layered graph of a variable grouping");
    group_cmd->add_option("--grouping", grouping_file, "Grouping file")->required();
    group_cmd->add_option("--out", grouping_out, "Graph file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*validate_cmd) return cmd_validate(validate_graph);
        if (*generate_cmd) return cmd_generate(gen);
        if (*solve_cmd) return cmd_solve(solve);
        if (*sweep_cmd) return cmd_sweep(sweep_config, sweep_seed, sweep_out);
        if (*project_cmd) return cmd_project(project_graph, project_vector, project_out);
        if (*group_cmd) return cmd_group_graph(grouping_file, grouping_out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const StructuralError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const InvariantError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}
