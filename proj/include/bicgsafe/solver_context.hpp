#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "bicgsafe/coefficients.hpp"
#include "bicgsafe/csr_matrix.hpp"
#include "bicgsafe/instrument.hpp"
#include "bicgsafe/reduction.hpp"
#include "bicgsafe/solver_types.hpp"
#include "bicgsafe/vector_ops.hpp"

namespace bicgsafe {

/// Observer that ignores every iteration.
struct NoObserver {
    template <typename... Args>
    void operator()(Args&&...) const noexcept {}
};

/**
 * Shared plumbing of one solve: routes every SpMV and reduction through the
 * engine while counting it against the current iteration, keeps the residual
 * history and runs the true-residual monitor.
 */
template <typename Scalar>
class SolverContext {
public:
    SolverContext(Method method, const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                  const SolverConfig& config, ReductionEngine& engine)
        : method_(method),
          A_(A),
          b_(b),
          config_(config),
          engine_(engine),
          drift_(config.monitor_every, config.epsilon)
    {
        config_.validate();
        if (!A.is_square()) throw DimensionError("solvers require a square matrix");
        require_same_size(b.size(), A.rows(), "right-hand side");
    }

    Method method() const noexcept { return method_; }
    const CsrMatrix<Scalar>& A() const noexcept { return A_; }
    const Vector<Scalar>& b() const noexcept { return b_; }
    const SolverConfig& config() const noexcept { return config_; }
    Index n() const noexcept { return A_.rows(); }
    int iteration() const noexcept { return iter_; }
    CounterLog& counters() noexcept { return counters_; }

    Vector<Scalar> zeros() const { return Vector<Scalar>::Zero(n()); }

    void begin_iteration(int i)
    {
        iter_ = i;
        counters_.begin_iteration(i);
    }

    void spmv(const Vector<Scalar>& x, Vector<Scalar>& y, std::string_view tag)
    {
        counters_.count_spmv();
        engine_.spmv(A_, x, y, iter_, tag);
    }

    ReductionTicket<Scalar> reduce(const DotBatch<Scalar>& batch, std::string_view tag = "batch")
    {
        counters_.count_reduction(batch.size());
        return engine_.submit_batch(batch, iter_, tag);
    }

    /// Reduction in flight while y = A x is computed.
    Overlapped<Scalar> overlap(const DotBatch<Scalar>& batch, const Vector<Scalar>& x,
                                    Vector<Scalar>& y, std::string_view spmv_tag,
                                    std::string_view reduce_tag = "batch")
    {
        counters_.count_reduction(batch.size());
        counters_.count_spmv();
        return engine_.overlap(batch, A_, x, y, iter_, reduce_tag, spmv_tag);
    }

    void tally(const FlopTally& t) { counters_.count_flops(t); }
    void coefficients_ready() { engine_.coeff_ready(iter_); }

    /// Completed dot value, checked for finiteness.
    static Scalar value(const ReductionTicket<Scalar>& ticket, DotLabel label)
    {
        const Scalar v = ticket[label];
        if (!std::isfinite(v))
            throw NonFiniteError(std::string("dot '") + label_char(label) + "' is not finite", -1);
        return v;
    }

    void set_initial_norm_squared(Scalar rr)
    {
        initial_norm_ = std::sqrt(std::max(rr, Scalar(0)));
    }

    Scalar relative(Scalar rr) const
    {
        const Scalar norm = std::sqrt(std::max(rr, Scalar(0)));
        return initial_norm_ > Scalar(0) ? norm / initial_norm_ : norm;
    }

    /// Records the convergence-check value of the current iteration; true when converged.
    bool check(Scalar rel_res, const Vector<Scalar>& x, bool replaced = false)
    {
        IterationRecord<Scalar> rec;
        rec.iter = iter_;
        rec.rel_res_recur = rel_res;
        rec.replaced = replaced;
        best_ = std::min(best_, rel_res);
        const bool converged = rel_res <= Scalar(config_.epsilon);
        const bool terminal = converged || iter_ >= config_.max_iters;
        if (replaced || drift_.due(iter_) || terminal) {
            rec.rel_res_true = true_relative_residual(x);
            drift_.observe(iter_, static_cast<double>(rel_res), static_cast<double>(*rec.rel_res_true));
        }
        last_ = rec;
        if (config_.record_history) history_.push_back(rec);
        return converged;
    }

    bool at_iteration_limit() const noexcept { return iter_ >= config_.max_iters; }

    void set_coefficients(const CoefficientSet<Scalar>& c)
    {
        if (config_.record_history && !history_.empty()) history_.back().coefficients = c;
    }

    /// ||b - A x|| / ||r_0|| through the engine, counted as monitoring work.
    Scalar true_relative_residual(const Vector<Scalar>& x)
    {
        monitor_ax_.resize(n());
        counters_.count_monitor_spmv();
        engine_.spmv(A_, x, monitor_ax_, iter_, "monitor");
        monitor_r_ = b_ - monitor_ax_;
        DotBatch<Scalar> batch;
        batch.add(DotLabel::r, monitor_r_, monitor_r_);
        counters_.count_monitor_dots(1);
        auto ticket = engine_.submit_batch(batch, iter_, "monitor");
        ticket.wait();
        return relative(ticket[DotLabel::r]);
    }

    SolveOutcome<Scalar> finish(SolveStatus status, Vector<Scalar> x, std::string detail = {})
    {
        SolveOutcome<Scalar> out;
        out.status = status;
        out.detail = std::move(detail);
        out.iterations = iter_ < 0 ? 0 : iter_;
        if (status == SolveStatus::Breakdown || status == SolveStatus::NonFinite) {
            out.failed_iter = iter_;
        }
        counters_.set_terminal(iter_);
        if (last_) {
            out.final_rel_res_recur = last_->rel_res_recur;
            if (last_->rel_res_true) {
                out.final_rel_res_true = *last_->rel_res_true;
            } else {
                out.final_rel_res_true = safe_true_residual(x);
            }
        } else {
            out.final_rel_res_true = safe_true_residual(x);
        }
        out.best_rel_res_recur = best_;
        out.history = std::move(history_);
        out.x = std::move(x);
        out.counters = counters_;
        out.drift = drift_.reports();
        return out;
    }

    /**
     * Runs a solver body and maps breakdown/non-finite failures to outcomes.
     * The body returns the final status and receives the iterate it updates.
     */
    template <typename Body>
    SolveOutcome<Scalar> run(Vector<Scalar>& x, Body&& body)
    {
        SolveStatus status{};
        std::string detail;
        try {
            status = body();
        } catch (const BreakdownError& e) {
            status = SolveStatus::Breakdown;
            detail = e.quantity();
        } catch (const NonFiniteError& e) {
            status = SolveStatus::NonFinite;
            detail = e.what();
        }
        return finish(status, std::move(x), std::move(detail));
    }

private:
    Scalar safe_true_residual(const Vector<Scalar>& x)
    {
        try {
            return true_relative_residual(x);
        } catch (const NonFiniteError&) {
            return std::numeric_limits<Scalar>::quiet_NaN();
        }
    }

    Method method_;
    const CsrMatrix<Scalar>& A_;
    const Vector<Scalar>& b_;
    SolverConfig config_;
    ReductionEngine& engine_;
    CounterLog counters_;
    DriftMonitor drift_;
    std::vector<IterationRecord<Scalar>> history_;
    std::optional<IterationRecord<Scalar>> last_;
    Scalar initial_norm_{0};
    Scalar best_{std::numeric_limits<Scalar>::infinity()};
    int iter_ = kSetupIteration;
    Vector<Scalar> monitor_ax_;
    Vector<Scalar> monitor_r_;
};

}  // namespace bicgsafe
