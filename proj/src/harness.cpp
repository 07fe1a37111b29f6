#include "pathpca/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include "pathpca/errors.hpp"
#include "pathpca/metrics.hpp"

namespace pathpca {

Path sample_uniform_path(const Dag& dag, Stream& stream) {
    // Path counts to T in floating point; exact counts may overflow and only
    // their ratios matter here.
    std::vector<long double> to_terminal(dag.vertex_count(), 0.0L);
    const auto order = dag.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const VertexId v = *it;
        if (v == dag.terminal()) {
            to_terminal[v] = 1.0L;
            continue;
        }
        for (VertexId u : dag.successors(v)) to_terminal[v] += to_terminal[u];
    }
    std::vector<VertexId> vertices{dag.source()};
    while (vertices.back() != dag.terminal()) {
        const VertexId v = vertices.back();
        long double target = static_cast<long double>(stream.uniform()) * to_terminal[v];
        VertexId chosen = dag.vertex_count();
        for (VertexId u : dag.successors(v)) {
            if (to_terminal[u] == 0.0L) continue;
            chosen = u;
            if (target < to_terminal[u]) break;
            target -= to_terminal[u];
        }
        vertices.push_back(chosen);
    }
    return make_path(dag, std::move(vertices));
}

GeneratedInstance generate_instance(const Dag& dag, const ModelSpec& model, std::size_t n,
                                    std::uint64_t seed) {
    GeneratedInstance out;
    Stream stream(seed, 0);
    out.path = sample_uniform_path(dag, stream);
    out.x_star = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dag.dimension()));
    // A zero draw on every coordinate has probability zero; redraw anyway.
    while (out.x_star.squaredNorm() == 0.0)
        for (std::size_t i : out.path.support) out.x_star[i] = stream.normal();
    out.x_star.normalize();

    const std::uint64_t sample_seed = derive_seed(seed, 1);
    switch (model.kind) {
        case ModelKind::spiked:
            out.samples = sample_spiked({out.x_star, model.beta}, n, sample_seed);
            break;
        case ModelKind::spectrum: {
            const auto sigma = covariance_with_spectrum(
                out.x_star, power_law_spectrum(dag.dimension(), model.exponent));
            out.samples = gaussian_sampler(sigma, n, sample_seed);
            break;
        }
    }
    return out;
}

SolverKind parse_solver(const std::string& name) {
    if (name == "power") return SolverKind::power;
    if (name == "sample") return SolverKind::sample;
    if (name == "brute") return SolverKind::brute;
    if (name == "sparse-power") return SolverKind::sparse_power;
    throw UsageError("unknown solver '" + name + "' (expected power, sample, brute or sparse-power)");
}

std::string solver_name(SolverKind kind) {
    switch (kind) {
        case SolverKind::power: return "power";
        case SolverKind::sample: return "sample";
        case SolverKind::brute: return "brute";
        case SolverKind::sparse_power: return "sparse-power";
    }
    return "unknown";
}

SolverOutput run_solver(SolverKind kind, const CovarianceEstimate& sigma, const Dag& dag,
                        const SolverOptions& options) {
    SolverOutput out;
    auto from_estimate = [&out](EstimateResult r) {
        out.x = r.x_hat.x;
        out.objective = r.objective;
        out.iterations = r.iterations_or_samples;
        out.structured = std::move(r.x_hat);
    };
    switch (kind) {
        case SolverKind::power:
            from_estimate(graph_truncated_power(sigma, dag, options.power));
            break;
        case SolverKind::sample:
            from_estimate(sample_and_project(sigma, dag, options.sample));
            break;
        case SolverKind::brute:
            from_estimate(brute_force_solve(sigma, dag, options.brute_cap));
            break;
        case SolverKind::sparse_power: {
            if (options.sparse_k == 0) throw UsageError("sparse-power needs a sparsity level");
            SparseEstimateResult r = sparse_truncated_power(sigma, options.sparse_k, options.power);
            out.x = std::move(r.x);
            out.objective = r.objective;
            out.iterations = r.iterations;
            break;
        }
    }
    return out;
}

void verify_structured_output(const Dag& dag, const SolverOutput& output) {
    if (!output.structured) return;
    if (!is_feasible(dag, *output.structured, 1e-9) || output.structured->x != output.x)
        throw InvariantError("solver output is not supported on an S-T path of the graph");
}

std::size_t nearest_layer_count(std::size_t p) {
    if (p < 3) throw UsageError("layer graph needs p >= 3");
    const double target = std::log(static_cast<double>(p));
    std::size_t best = 1;
    for (std::size_t k = 1; k <= p - 2; ++k) {
        if ((p - 2) % k) continue;
        if (std::abs(static_cast<double>(k) - target) < std::abs(static_cast<double>(best) - target))
            best = k;
    }
    return best;
}

namespace {

std::size_t to_size(const io::KeyValueConfig& cfg, const std::string& key) {
    const auto& e = cfg.entries.at(key);
    std::size_t value = 0;
    const auto& s = e.value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(cfg.source_name, e.line, key + ": expected a nonnegative integer, got '" + s + "'");
    return value;
}

double to_real(const io::KeyValueConfig& cfg, const std::string& key) {
    const auto& e = cfg.entries.at(key);
    double value = 0.0;
    const auto& s = e.value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
        throw ParseError(cfg.source_name, e.line, key + ": expected a number, got '" + s + "'");
    return value;
}

bool to_bool(const io::KeyValueConfig& cfg, const std::string& key) {
    const auto& e = cfg.entries.at(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ParseError(cfg.source_name, e.line, key + ": expected true or false");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        out.push_back(item.substr(first, item.find_last_not_of(" \t") - first + 1));
    }
    return out;
}

std::string csv_field(const std::string& s) {
    std::string out = s;
    std::replace(out.begin(), out.end(), ',', ';');
    std::replace(out.begin(), out.end(), '\n', ' ');
    return out;
}

std::string csv_number(double v) { return std::isnan(v) ? "nan" : io::format_double(v); }

}  // namespace

SweepConfig parse_sweep_config(const io::KeyValueConfig& cfg) {
    static const std::vector<std::string> known = {
        "graph", "p", "k", "d", "model", "beta", "exponent", "n", "trials", "solvers", "rank",
        "budget", "max_iters", "tol", "init", "brute_cap", "sparse_k", "seed", "zero_tol",
        "record_timing", "out"};
    for (const auto& [key, entry] : cfg.entries)
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ParseError(cfg.source_name, entry.line, "unknown key '" + key + "'");

    SweepConfig out;
    const std::string graph = cfg.has("graph") ? cfg.entries.at("graph").value : "layer";
    if (graph != "layer") {
        out.graph_file = graph;
    } else {
        if (!cfg.has("p")) throw UsageError("layer graph sweep needs p");
        out.layer.p = to_size(cfg, "p");
        if (!cfg.has("k") || cfg.entries.at("k").value == "auto") out.k_auto = true;
        else out.layer.k = to_size(cfg, "k");
        if (!cfg.has("d") || cfg.entries.at("d").value == "auto") out.d_auto = true;
        else out.layer.d = to_size(cfg, "d");
    }

    if (cfg.has("model")) {
        const auto& m = cfg.entries.at("model");
        if (m.value == "spiked") out.model.kind = ModelKind::spiked;
        else if (m.value == "spectrum") out.model.kind = ModelKind::spectrum;
        else throw ParseError(cfg.source_name, m.line, "model must be spiked or spectrum");
    }
    if (cfg.has("beta")) out.model.beta = to_real(cfg, "beta");
    if (cfg.has("exponent")) out.model.exponent = to_real(cfg, "exponent");
    if (!(out.model.beta >= 0.0)) throw UsageError("beta must be nonnegative");

    if (!cfg.has("n")) throw UsageError("sweep needs an n grid");
    {
        const auto& e = cfg.entries.at("n");
        for (const auto& item : split_list(e.value)) {
            std::size_t v = 0;
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc() || ptr != item.data() + item.size() || v == 0)
                throw ParseError(cfg.source_name, e.line, "n: bad sample count '" + item + "'");
            if (!out.n_grid.empty() && v <= out.n_grid.back())
                throw ParseError(cfg.source_name, e.line, "n grid must be strictly ascending");
            out.n_grid.push_back(v);
        }
        if (out.n_grid.empty()) throw ParseError(cfg.source_name, e.line, "n grid is empty");
    }
    if (cfg.has("trials")) out.trials = to_size(cfg, "trials");
    if (out.trials < 1) throw UsageError("trials must be at least 1");

    const std::string solvers = cfg.has("solvers") ? cfg.entries.at("solvers").value : "power";
    for (const auto& name : split_list(solvers)) out.solvers.push_back(parse_solver(name));
    if (out.solvers.empty()) throw UsageError("no solvers selected");

    if (cfg.has("rank")) out.options.sample.r = to_size(cfg, "rank");
    if (cfg.has("budget")) out.options.sample.budget = to_size(cfg, "budget");
    if (cfg.has("max_iters")) out.options.power.max_iters = to_size(cfg, "max_iters");
    if (cfg.has("tol")) out.options.power.tol = to_real(cfg, "tol");
    if (cfg.has("init")) {
        const auto& e = cfg.entries.at("init");
        if (e.value == "diag") out.options.power.init = InitKind::diag_heuristic;
        else if (e.value == "random") out.options.power.init = InitKind::random;
        else throw ParseError(cfg.source_name, e.line, "init must be diag or random");
    }
    if (cfg.has("brute_cap")) out.options.brute_cap = to_size(cfg, "brute_cap");
    if (cfg.has("sparse_k")) out.options.sparse_k = to_size(cfg, "sparse_k");
    if (cfg.has("seed")) out.seed = to_size(cfg, "seed");
    if (cfg.has("zero_tol")) out.zero_tol = to_real(cfg, "zero_tol");
    if (cfg.has("record_timing")) out.record_timing = to_bool(cfg, "record_timing");
    if (cfg.has("out")) out.out = cfg.entries.at("out").value;
    return out;
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t trial, std::size_t n) {
    return derive_seed(derive_seed(master, trial), n);
}

Dag sweep_graph(SweepConfig& cfg) {
    if (cfg.graph_file) return Dag::build(io::read_graph_file(*cfg.graph_file));
    if (cfg.k_auto) cfg.layer.k = nearest_layer_count(cfg.layer.p);
    if (cfg.d_auto) cfg.layer.d = cfg.layer.layer_size();
    return build_layer_graph(cfg.layer);
}

std::vector<ResultRecord> run_cell(const SweepConfig& cfg, const Dag& dag, std::size_t trial,
                                   std::size_t n) {
    const std::uint64_t seed = cell_seed(cfg.seed, trial, n);
    const GeneratedInstance instance = generate_instance(dag, cfg.model, n, seed);
    const CovarianceEstimate sigma = empirical_covariance(instance.samples);

    std::vector<ResultRecord> rows;
    for (SolverKind kind : cfg.solvers) {
        ResultRecord row;
        row.trial = trial;
        row.n = n;
        row.solver = solver_name(kind);
        row.seed = seed;

        SolverOptions options = cfg.options;
        const std::uint64_t solver_seed = derive_seed(seed, 16 + static_cast<std::uint64_t>(kind));
        options.power.seed = solver_seed;
        options.sample.seed = solver_seed;
        if (options.sparse_k == 0) options.sparse_k = instance.path.support.size();

        const auto start = std::chrono::steady_clock::now();
        try {
            const SolverOutput output = run_solver(kind, sigma, dag, options);
            verify_structured_output(dag, output);
            row.projector_loss = projector_distance(output.x, instance.x_star);
            row.jaccard = support_jaccard(output.x, instance.x_star, cfg.zero_tol);
            row.objective = output.objective;
        } catch (const InvariantError&) {
            throw;
        } catch (const Error& e) {
            row.projector_loss = row.jaccard = row.objective = std::nan("");
            row.status = std::string("error: ") + e.what();
        }
        row.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(std::move(row));
    }
    return rows;
}

SweepResult run_sweep(SweepConfig cfg) {
    const Dag dag = sweep_graph(cfg);

    SweepResult result;
    for (std::size_t trial = 0; trial < cfg.trials; ++trial)
        for (std::size_t n : cfg.n_grid) {
            auto rows = run_cell(cfg, dag, trial, n);
            result.rows.insert(result.rows.end(), std::make_move_iterator(rows.begin()),
                               std::make_move_iterator(rows.end()));
        }

    std::ostringstream csv;
    csv << "# graph=";
    if (cfg.graph_file) csv << "file vertices=" << dag.vertex_count() << " vars=" << dag.dimension();
    else csv << "layer p=" << cfg.layer.p << " k=" << cfg.layer.k << " d=" << cfg.layer.d;
    csv << " model=" << (cfg.model.kind == ModelKind::spiked ? "spiked" : "spectrum");
    if (cfg.model.kind == ModelKind::spiked) csv << " beta=" << io::format_double(cfg.model.beta);
    else csv << " exponent=" << io::format_double(cfg.model.exponent);
    csv << " seed=" << cfg.seed << '\n';
    csv << "trial,n,solver,projector_loss,jaccard,objective,seed,status";
    if (cfg.record_timing) csv << ",wall_time";
    csv << '\n';
    for (const ResultRecord& r : result.rows) {
        csv << r.trial << ',' << r.n << ',' << r.solver << ',' << csv_number(r.projector_loss) << ','
            << csv_number(r.jaccard) << ',' << csv_number(r.objective) << ',' << r.seed << ','
            << csv_field(r.status);
        if (cfg.record_timing) csv << ',' << io::format_double(r.wall_time);
        csv << '\n';
    }
    result.csv = csv.str();

    nlohmann::json solvers = nlohmann::json::array();
    for (SolverKind kind : cfg.solvers) solvers.push_back(solver_name(kind));
    nlohmann::json graph;
    if (cfg.graph_file) {
        graph = {{"file", *cfg.graph_file}, {"vertices", dag.vertex_count()}, {"vars", dag.dimension()}};
    } else {
        graph = {{"type", "layer"}, {"p", cfg.layer.p}, {"k", cfg.layer.k}, {"d", cfg.layer.d},
                 {"k_auto", cfg.k_auto}, {"d_auto", cfg.d_auto}};
    }
    result.sidecar = {
        {"graph", graph},
        {"model",
         {{"kind", cfg.model.kind == ModelKind::spiked ? "spiked" : "spectrum"},
          {"beta", cfg.model.beta},
          {"exponent", cfg.model.exponent}}},
        {"n", cfg.n_grid},
        {"trials", cfg.trials},
        {"solvers", solvers},
        {"power",
         {{"max_iters", cfg.options.power.max_iters},
          {"tol", cfg.options.power.tol},
          {"init", cfg.options.power.init == InitKind::random ? "random" : "diag"}}},
        {"sample", {{"rank", cfg.options.sample.r}, {"budget", cfg.options.sample.budget}}},
        {"brute_cap", cfg.options.brute_cap},
        {"sparse_k", cfg.options.sparse_k},
        {"seed", cfg.seed},
        {"zero_tol", cfg.zero_tol},
        {"record_timing", cfg.record_timing},
        {"columns", {"trial", "n", "solver", "projector_loss", "jaccard", "objective", "seed", "status"}},
    };
    return result;
}

}  // namespace pathpca
