#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bicgsafe/event_log.hpp"
#include "bicgsafe/method.hpp"
#include "bicgsafe/vector_ops.hpp"

namespace bicgsafe {

struct OpCounters {
    long n_spmv = 0;
    long n_reduction_phases = 0;
    long n_dots = 0;
    long n_scalar_mults = 0;
    long n_vec_adds = 0;
    long n_workspace_vectors = 0;
    /// Drift-monitoring work, kept out of the algorithmic counts.
    long n_monitor_spmv = 0;
    long n_monitor_dots = 0;

    OpCounters& operator+=(const OpCounters& o);
    friend OpCounters operator-(OpCounters a, const OpCounters& b);
    friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

/// Counters bucketed by the iteration that performed the work.
class CounterLog {
public:
    void begin_iteration(int iter);
    int current_iteration() const noexcept { return current_; }

    void count_spmv() { bump([](OpCounters& c) { ++c.n_spmv; }); }
    void count_reduction(std::size_t dots)
    {
        bump([dots](OpCounters& c) {
            ++c.n_reduction_phases;
            c.n_dots += static_cast<long>(dots);
        });
    }
    void count_flops(const FlopTally& t)
    {
        bump([&t](OpCounters& c) {
            c.n_scalar_mults += t.scalar_mults;
            c.n_vec_adds += t.vec_adds;
        });
    }
    void count_monitor_spmv() { bump([](OpCounters& c) { ++c.n_monitor_spmv; }); }
    void count_monitor_dots(std::size_t dots)
    {
        bump([dots](OpCounters& c) { c.n_monitor_dots += static_cast<long>(dots); });
    }
    void set_workspace_vectors(long n) { totals_.n_workspace_vectors = setup_.n_workspace_vectors = n; }

    /// Iteration performing extra work (residual replacement); excluded from steady state.
    void mark_irregular(int iter) { irregular_.push_back(iter); }
    /// The convergence-check-only iteration that ended the solve.
    void set_terminal(int iter) { terminal_ = iter; }

    const OpCounters& totals() const noexcept { return totals_; }
    const OpCounters& setup() const noexcept { return setup_; }
    const std::vector<OpCounters>& per_iteration() const noexcept { return per_iter_; }
    const std::vector<int>& irregular() const noexcept { return irregular_; }
    std::optional<int> terminal() const noexcept { return terminal_; }

private:
    template <typename F>
    void bump(F&& f)
    {
        f(totals_);
        f(current_ < 0 ? setup_ : per_iter_[static_cast<std::size_t>(current_)]);
    }

    int current_ = kSetupIteration;
    OpCounters totals_;
    OpCounters setup_;
    std::vector<OpCounters> per_iter_;
    std::vector<int> irregular_;
    std::optional<int> terminal_;
};

/// Per-iteration cost figures listed for a method (scalar-mult/add/memory columns informational).
struct ReferenceCosts {
    long n_spmv;
    long n_scalar_mults;
    long n_vec_adds;
    long n_dots;
    long n_memories;
    long n_reduction_phases;
};

std::optional<ReferenceCosts> reference_costs(Method m);

struct CostRow {
    Method method{};
    /// Counters of one steady-state iteration (all steady iterations agree).
    OpCounters steady;
    int steady_iterations = 0;
    std::optional<ReferenceCosts> reference;
    /// Counters of iteration 0, which uses the reduced first-iteration batch.
    std::optional<OpCounters> first;
};

class CostMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Steady-state (iteration >= 1, excluding the terminal check and irregular
 * iterations) per-iteration counters. Throws CostMismatch when steady
 * iterations disagree or when #Ax, #dots or the reduction-phase count differs
 * from the reference.
 */
CostRow per_iteration_costs(const CounterLog& counters, Method method);

struct DriftReport {
    int iter = 0;
    double rel_res_recur = 0.0;
    double rel_res_true = 0.0;
    double gap = 0.0;
    bool stagnated = false;
};

/// Classifies true-vs-recurrence residual gaps.
class DriftMonitor {
public:
    DriftMonitor(int every_k, double epsilon) : every_k_(every_k), epsilon_(epsilon)
    {
        if (every_k < 0) throw std::invalid_argument("monitor period must be non-negative");
    }

    bool due(int iter) const noexcept { return every_k_ > 0 && iter % every_k_ == 0; }
    int every_k() const noexcept { return every_k_; }

    const DriftReport& observe(int iter, double rel_recur, double rel_true)
    {
        DriftReport rep;
        rep.iter = iter;
        rep.rel_res_recur = rel_recur;
        rep.rel_res_true = rel_true;
        rep.gap = std::abs(rel_true - rel_recur);
        rep.stagnated = rel_recur < epsilon_ && rel_true > 10.0 * epsilon_;
        reports_.push_back(rep);
        return reports_.back();
    }

    const std::vector<DriftReport>& reports() const noexcept { return reports_; }
    bool any_stagnated() const noexcept
    {
        for (const auto& r : reports_)
            if (r.stagnated) return true;
        return false;
    }

private:
    int every_k_;
    double epsilon_;
    std::vector<DriftReport> reports_;
};

}  // namespace bicgsafe
