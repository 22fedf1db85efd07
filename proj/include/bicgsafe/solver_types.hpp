#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bicgsafe/instrument.hpp"
#include "bicgsafe/method.hpp"
#include "bicgsafe/types.hpp"

namespace bicgsafe {

struct SolverConfig {
    double epsilon = 1e-8;
    int max_iters = 10000;
    bool record_history = true;
    /// Compute the true residual every `monitor_every` iterations (0 disables).
    int monitor_every = 50;

    void validate() const
    {
        if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
        if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
        if (monitor_every < 0) throw std::invalid_argument("monitor_every must be non-negative");
    }
};

/// Residual replacement every `epoch` iterations while the index is below `cutoff`.
struct RrSchedule {
    int epoch = 100;
    int cutoff = std::numeric_limits<int>::max();

    bool fires(int i) const noexcept { return i > 0 && i % epoch == 0 && i < cutoff; }

    void validate() const
    {
        if (epoch < 1) throw std::invalid_argument("rr epoch must be at least 1");
    }
};

template <typename Scalar>
struct CoefficientSet {
    Scalar alpha{0};
    Scalar beta{0};
    Scalar zeta{0};
    Scalar eta{0};
    Scalar omega{0};
};

template <typename Scalar>
struct IterationRecord {
    int iter = 0;
    /// Recurrence residual norm over the initial one.
    Scalar rel_res_recur{0};
    std::optional<Scalar> rel_res_true;
    /// Coefficients used by this iteration's updates; absent for the terminal check.
    std::optional<CoefficientSet<Scalar>> coefficients;
    /// r of this record was recomputed as b - A x by residual replacement.
    bool replaced = false;
};

enum class SolveStatus { Converged, MaxIters, Breakdown, NonFinite };

std::string_view to_string(SolveStatus s);

template <typename Scalar>
struct SolveOutcome {
    SolveStatus status = SolveStatus::MaxIters;
    int iterations = 0;
    /// Breakdown: the vanished quantity. NonFinite: what went non-finite.
    std::string detail;
    /// Iteration at which a Breakdown / NonFinite was detected.
    int failed_iter = -1;
    std::vector<IterationRecord<Scalar>> history;
    Vector<Scalar> x;
    Scalar final_rel_res_recur{0};
    Scalar final_rel_res_true{0};
    /// Smallest recurrence residual seen; reported for MaxIters runs.
    Scalar best_rel_res_recur{std::numeric_limits<Scalar>::infinity()};
    CounterLog counters;
    std::vector<DriftReport> drift;

    bool converged() const noexcept { return status == SolveStatus::Converged; }
};

}  // namespace bicgsafe
