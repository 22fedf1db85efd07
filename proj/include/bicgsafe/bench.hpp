#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bicgsafe/csr_matrix.hpp"
#include "bicgsafe/event_log.hpp"
#include "bicgsafe/matrix_market.hpp"
#include "bicgsafe/solver_types.hpp"

namespace bicgsafe::bench {

/// Bad flags, unreadable or malformed matrices, mismatched dimensions.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitConverged = 0;
inline constexpr int kExitMaxIters = 2;
inline constexpr int kExitBreakdown = 3;
inline constexpr int kExitInputError = 4;
inline constexpr int kExitNonFinite = 5;

int exit_code(SolveStatus status);

struct RunSpec {
    /// Matrix Market path, or gen:poisson1d:K / gen:poisson2d:K / gen:poisson3d:K.
    std::string matrix;
    Method solver = Method::SsBiCGSafe2;
    double tol = 1e-8;
    int max_iters = 10000;
    std::optional<int> rr_epoch;
    std::optional<int> rr_cutoff;
    std::size_t workers = 1;
    bool deterministic = true;
    int monitor_every = 50;
    std::optional<std::filesystem::path> history;
    std::optional<std::filesystem::path> events;
    std::optional<std::filesystem::path> costs;

    /// Throws InputError for inconsistent settings, e.g. rr flags on another solver.
    void validate() const;
    RrSchedule schedule() const;
};

struct Problem {
    CsrMatrix<double> A;
    MatrixMetadata meta;
};

/// Loads a file or expands a gen: pseudo-path. Throws InputError.
Problem load_problem(const std::string& matrix);

struct RunResult {
    SolveOutcome<double> outcome;
    MatrixMetadata meta;
    double wall_seconds = 0.0;
    int exit_code = kExitInputError;
    nlohmann::ordered_json summary;
    nlohmann::ordered_json costs;
};

/// b = A 1, x0 = 0. Writes the requested artifacts.
RunResult run(const RunSpec& spec);
RunResult run(const RunSpec& spec, const Problem& problem);

nlohmann::ordered_json counters_json(const OpCounters& c);
/// Steady-state costs with the reference figures, or the reason they are unavailable.
nlohmann::ordered_json costs_json(const SolveOutcome<double>& outcome, Method method);

struct Comparison {
    RunResult a;
    RunResult b;
    nlohmann::ordered_json summary;
};

/// Runs both specs on one matrix; writes the joined CSV to `csv` when given.
Comparison compare(const RunSpec& a, const RunSpec& b,
                   const std::optional<std::filesystem::path>& csv = std::nullopt);

}  // namespace bicgsafe::bench
