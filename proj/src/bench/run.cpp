#include "bicgsafe/bench.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include "bicgsafe/history_io.hpp"
#include "bicgsafe/instrument.hpp"
#include "bicgsafe/poisson.hpp"
#include "bicgsafe/solvers.hpp"

namespace bicgsafe::bench {

using json = nlohmann::ordered_json;

int exit_code(SolveStatus status)
{
    switch (status) {
    case SolveStatus::Converged: return kExitConverged;
    case SolveStatus::MaxIters: return kExitMaxIters;
    case SolveStatus::Breakdown: return kExitBreakdown;
    case SolveStatus::NonFinite: return kExitNonFinite;
    }
    return kExitInputError;
}

void RunSpec::validate() const
{
    if (matrix.empty()) throw InputError("no matrix given");
    if (!(tol > 0.0)) throw InputError("tolerance must be positive");
    if (max_iters < 1) throw InputError("max-iters must be at least 1");
    if (workers < 1) throw InputError("workers must be at least 1");
    if (solver != Method::PBiCGSafeRR && (rr_epoch || rr_cutoff))
        throw InputError("--rr-epoch and --rr-cutoff apply to pbicgsafe-rr only");
    if (rr_epoch && *rr_epoch < 1) throw InputError("rr-epoch must be at least 1");
    if (rr_cutoff && *rr_cutoff < 0) throw InputError("rr-cutoff must be non-negative");
}

RrSchedule RunSpec::schedule() const
{
    RrSchedule s;
    s.epoch = rr_epoch.value_or(100);
    s.cutoff = rr_cutoff.value_or(max_iters);
    return s;
}

namespace {

Problem generate(const std::string& spec)
{
    // gen:poisson<d>d:<k>
    const std::string body = spec.substr(4);
    const auto colon = body.find(':');
    const std::string kind = body.substr(0, colon);
    int dim = 0;
    if (kind == "poisson1d") dim = 1;
    else if (kind == "poisson2d") dim = 2;
    else if (kind == "poisson3d") dim = 3;
    if (dim == 0 || colon == std::string::npos)
        throw InputError("unknown generator '" + spec + "' (expected gen:poisson{1,2,3}d:K)");

    const std::string count = body.substr(colon + 1);
    long long k = 0;
    const auto res = std::from_chars(count.data(), count.data() + count.size(), k);
    if (res.ec != std::errc() || res.ptr != count.data() + count.size())
        throw InputError("bad points-per-axis in '" + spec + "'");

    Problem p;
    try {
        p.A = gen_poisson<double>(dim, static_cast<Index>(k));
    } catch (const std::exception& e) {
        throw InputError(spec + ": " + e.what());
    }
    p.meta.name = kind + "_" + count;
    p.meta.n = p.A.rows();
    p.meta.nnz = p.A.nnz();
    p.meta.symmetric = true;
    p.meta.source_path = spec;
    p.meta.file_entries = p.A.nnz();
    return p;
}

template <typename Write>
void write_file(const std::filesystem::path& path, Write&& write)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    write(out);
    if (!out) throw InputError("failed writing " + path.string());
}

json number(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

Problem load_problem(const std::string& matrix)
{
    if (matrix.rfind("gen:", 0) == 0) return generate(matrix);
    try {
        auto [A, meta] = load_matrix_market(matrix);
        return Problem{std::move(A), std::move(meta)};
    } catch (const MatrixMarketError& e) {
        throw InputError(matrix + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(matrix + ": " + e.what());
    }
}

json counters_json(const OpCounters& c)
{
    json j;
    j["n_spmv"] = c.n_spmv;
    j["n_reduction_phases"] = c.n_reduction_phases;
    j["n_dots"] = c.n_dots;
    j["n_scalar_mults"] = c.n_scalar_mults;
    j["n_vec_adds"] = c.n_vec_adds;
    j["n_workspace_vectors"] = c.n_workspace_vectors;
    j["n_monitor_spmv"] = c.n_monitor_spmv;
    j["n_monitor_dots"] = c.n_monitor_dots;
    return j;
}

json costs_json(const SolveOutcome<double>& outcome, Method method)
{
    json j;
    j["method"] = std::string(to_string(method));
    j["setup"] = counters_json(outcome.counters.setup());
    j["totals"] = counters_json(outcome.counters.totals());
    const auto& iters = outcome.counters.per_iteration();
    if (!iters.empty()) j["first_iteration"] = counters_json(iters.front());
    if (const auto ref = reference_costs(method)) {
        j["reference"] = {{"n_spmv", ref->n_spmv},           {"n_scalar_mults", ref->n_scalar_mults},
                          {"n_vec_adds", ref->n_vec_adds},   {"n_dots", ref->n_dots},
                          {"n_memories", ref->n_memories},   {"n_reduction_phases", ref->n_reduction_phases}};
    } else {
        j["reference"] = nullptr;
    }
    try {
        const CostRow row = per_iteration_costs(outcome.counters, method);
        j["steady"] = counters_json(row.steady);
        j["steady_iterations"] = row.steady_iterations;
        j["matches_reference"] = row.reference.has_value();
    } catch (const CostMismatch& e) {
        j["steady"] = nullptr;
        j["matches_reference"] = false;
        j["error"] = e.what();
    }
    json drift = json::array();
    for (const auto& d : outcome.drift) {
        drift.push_back({{"iter", d.iter},
                         {"rel_res_recur", number(d.rel_res_recur)},
                         {"rel_res_true", number(d.rel_res_true)},
                         {"gap", number(d.gap)},
                         {"stagnated", d.stagnated}});
    }
    j["drift"] = std::move(drift);
    return j;
}

RunResult run(const RunSpec& spec)
{
    spec.validate();
    const Problem problem = load_problem(spec.matrix);
    return run(spec, problem);
}

RunResult run(const RunSpec& spec, const Problem& problem)
{
    spec.validate();
    const auto& A = problem.A;
    if (!A.is_square())
        throw InputError(problem.meta.name + " is " + std::to_string(A.rows()) + "x" +
                         std::to_string(A.cols()) + ", solvers need a square matrix");

    const Vector<double> ones = Vector<double>::Ones(A.cols());
    Vector<double> b;
    try {
        b = spmv(A, ones);
    } catch (const NonFiniteError& e) {
        throw InputError(problem.meta.name + ": right-hand side " + e.what());
    }
    const Vector<double> x0 = Vector<double>::Zero(A.rows());

    SolverConfig config;
    config.epsilon = spec.tol;
    config.max_iters = spec.max_iters;
    config.monitor_every = spec.monitor_every;

    EngineOptions options;
    options.workers = spec.workers;
    options.mode = spec.workers > 1 ? ExecutionMode::Concurrent : ExecutionMode::Sequential;
    options.deterministic = spec.deterministic;
    EventLog log;
    ReductionEngine engine(options, spec.events ? &log : nullptr);

    RunResult result;
    result.meta = problem.meta;
    const auto start = std::chrono::steady_clock::now();
    result.outcome = solve(spec.solver, A, b, x0, config, engine, spec.schedule());
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.exit_code = exit_code(result.outcome.status);
    const auto& out = result.outcome;

    json& s = result.summary;
    s["matrix"] = problem.meta.name;
    s["source"] = problem.meta.source_path;
    s["n"] = problem.meta.n;
    s["nnz"] = problem.meta.nnz;
    s["solver"] = std::string(to_string(spec.solver));
    s["tol"] = spec.tol;
    s["max_iters"] = spec.max_iters;
    if (spec.solver == Method::PBiCGSafeRR) {
        s["rr_epoch"] = spec.schedule().epoch;
        s["rr_cutoff"] = spec.schedule().cutoff;
    }
    s["workers"] = spec.workers;
    s["deterministic"] = spec.deterministic;
    s["status"] = std::string(to_string(out.status));
    s["exit_code"] = result.exit_code;
    s["iterations"] = out.iterations;
    s["final_rel_res_recur"] = number(out.final_rel_res_recur);
    s["final_rel_res_true"] = number(out.final_rel_res_true);
    s["best_rel_res_recur"] = number(out.best_rel_res_recur);
    if (!out.detail.empty()) s["detail"] = out.detail;
    if (out.failed_iter >= 0) s["failed_iter"] = out.failed_iter;
    bool stagnated = false;
    for (const auto& d : out.drift) stagnated = stagnated || d.stagnated;
    s["stagnated"] = stagnated;
    s["wall_time_s"] = result.wall_seconds;
    s["counters"] = counters_json(out.counters.totals());

    result.costs = costs_json(out, spec.solver);

    if (spec.history)
        write_file(*spec.history, [&](std::ostream& o) { write_history_csv(o, out.history); });
    if (spec.events) write_file(*spec.events, [&](std::ostream& o) { log.write_jsonl(o); });
    if (spec.costs) write_file(*spec.costs, [&](std::ostream& o) { o << result.costs.dump(2) << '\n'; });
    return result;
}

Comparison compare(const RunSpec& a, const RunSpec& b, const std::optional<std::filesystem::path>& csv)
{
    if (a.matrix != b.matrix)
        throw InputError("compare needs both runs on the same matrix ('" + a.matrix + "' vs '" +
                         b.matrix + "')");
    a.validate();
    b.validate();
    const Problem problem = load_problem(a.matrix);

    Comparison c;
    c.a = run(a, problem);
    c.b = run(b, problem);
    const auto rows = join_histories(c.a.outcome.history, c.b.outcome.history);
    if (csv) write_file(*csv, [&](std::ostream& o) { write_comparison_csv(o, rows); });

    double max_ratio_20 = 0.0;
    for (std::size_t k = 0; k < rows.size() && k < 20; ++k)
        if (rows[k].log10_ratio) max_ratio_20 = std::max(max_ratio_20, *rows[k].log10_ratio);

    c.summary["a"] = c.a.summary;
    c.summary["b"] = c.b.summary;
    c.summary["rows"] = rows.size();
    c.summary["max_abs_log10_ratio_first_20"] = max_ratio_20;
    return c;
}

}  // namespace bicgsafe::bench
