#pragma once

#include <optional>

#include "bicgsafe/ssbicgsafe2.hpp"

namespace bicgsafe {

/**
 * Vectors of a finished p-BiCGSafe iteration i, for checking the recurrences
 * against their definitions: s ~ A r, q ~ A o, w ~ A u, l ~ A t, g ~ A y.
 * r, s, y, g, x already hold the i+1 values; o, q, u, w, t, l hold the i values.
 */
template <typename Scalar>
struct PipelinedState {
    int iter;
    bool replaced;
    const Vector<Scalar>& x;
    const Vector<Scalar>& r;
    const Vector<Scalar>& s;
    const Vector<Scalar>& o;
    const Vector<Scalar>& q;
    const Vector<Scalar>& u;
    const Vector<Scalar>& w;
    const Vector<Scalar>& t;
    const Vector<Scalar>& l;
    const Vector<Scalar>& y;
    const Vector<Scalar>& g;
};

namespace detail {

template <typename Scalar, typename Observer>
SolveOutcome<Scalar> pipelined_safe(Method method, const CsrMatrix<Scalar>& A,
                                    const Vector<Scalar>& b, const Vector<Scalar>& x0,
                                    const SolverConfig& config, ReductionEngine& engine,
                                    std::optional<RrSchedule> schedule, Observer& observer)
{
    if (schedule) schedule->validate();
    SolverContext<Scalar> ctx(method, A, b, config, engine);
    require_same_size(x0.size(), A.rows(), "initial guess");
    const Index n = ctx.n();
    const auto replaces = [&](int i) { return schedule && schedule->fires(i); };

    Vector<Scalar> x = x0;
    Vector<Scalar> r(n), rs(n), s(n), o(n), q(n), As(n), Aw(n);
    Vector<Scalar> p = ctx.zeros(), u = ctx.zeros(), t = ctx.zeros(), w = ctx.zeros();
    Vector<Scalar> y = ctx.zeros(), z = ctx.zeros(), g = ctx.zeros(), l = ctx.zeros();
    ctx.counters().set_workspace_vectors(16);

    return ctx.run(x, [&] {
        ctx.begin_iteration(kSetupIteration);
        ctx.spmv(x, Aw, "Ax0");
        ctx.tally(difference(r, b, Aw));
        rs = r;
        ctx.spmv(r, s, "Ar0");

        SafeCoefficients<Scalar> k;
        bool replaced = false;
        for (int i = 0;; ++i) {
            const bool first = i == 0;
            ctx.begin_iteration(i);
            auto step = ctx.overlap(safe_batch(rs, r, s, y, t, first), s, As, "As");
            step.ticket.wait();
            const Scalar rr = ctx.value(step.ticket, DotLabel::r);
            if (first) ctx.set_initial_norm_squared(rr);
            if (ctx.check(ctx.relative(rr), x, replaced)) return SolveStatus::Converged;
            if (ctx.at_iteration_limit()) return SolveStatus::MaxIters;

            k = safe_coefficients(step.ticket, k, first);
            ctx.coefficients_ready();
            ctx.set_coefficients({k.alpha, k.beta, k.zeta, k.eta, Scalar(0)});

            ctx.tally(update_direction(p, r, k.beta, u));
            ctx.tally(add_scaled(o, s, k.beta, t));
            ctx.tally(nested_update(u, k.zeta, o, k.eta, y, k.beta));
            step.product.wait();

            replaced = replaces(i);
            if (replaced) {
                ctx.counters().mark_irregular(i);
                ctx.spmv(o, q, "Ao");
                ctx.spmv(u, w, "Au");
            } else {
                ctx.tally(add_scaled(q, As, k.beta, l));
                ctx.tally(nested_update(w, k.zeta, q, k.eta, g, k.beta));
            }
            ctx.tally(difference(t, o, w));
            ctx.tally(three_term(z, k.zeta, r, k.eta, z, -k.alpha, u));
            ctx.tally(three_term(y, k.zeta, s, k.eta, y, -k.alpha, w));
            ctx.tally(add_scaled_and(x, x, k.alpha, p, z));

            if (replaced) {
                ctx.spmv(x, Aw, "Ax");
                ctx.tally(difference(r, b, Aw));
                ctx.spmv(t, l, "At");
                ctx.spmv(y, g, "Ay");
                ctx.spmv(r, s, "Ar");
            } else {
                ctx.tally(subtract_scaled_and(r, r, k.alpha, o, y));
                ctx.spmv(w, Aw, "Aw");
                ctx.tally(difference(l, q, Aw));
                ctx.tally(three_term(g, k.zeta, As, k.eta, g, -k.alpha, Aw));
                ctx.tally(subtract_scaled_and(s, s, k.alpha, q, g));
            }
            observer(PipelinedState<Scalar>{i, replaced, x, r, s, o, q, u, w, t, l, y, g});
        }
    });
}

}  // namespace detail

/// p-BiCGSafe: the nine-dot reduction runs while A s is computed.
template <typename Scalar, typename Observer = NoObserver>
SolveOutcome<Scalar> solve_pbicgsafe(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                                     const Vector<Scalar>& x0, const SolverConfig& config,
                                     ReductionEngine& engine, Observer&& observer = {})
{
    return detail::pipelined_safe(Method::PBiCGSafe, A, b, x0, config, engine, std::nullopt,
                                  observer);
}

template <typename Scalar>
SolveOutcome<Scalar> solve_pbicgsafe(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                                     const Vector<Scalar>& x0, const SolverConfig& config = {})
{
    ReductionEngine engine;
    return solve_pbicgsafe(A, b, x0, config, engine);
}

/**
 * p-BiCGSafe with residual replacement. At iterations the schedule fires,
 * q, w, r, l, g and s are recomputed from their definitions by explicit
 * products; the iteration after carries replaced = true.
 */
template <typename Scalar, typename Observer = NoObserver>
SolveOutcome<Scalar> solve_pbicgsafe_rr(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                                        const Vector<Scalar>& x0, const SolverConfig& config,
                                        const RrSchedule& schedule, ReductionEngine& engine,
                                        Observer&& observer = {})
{
    return detail::pipelined_safe(Method::PBiCGSafeRR, A, b, x0, config, engine,
                                  std::optional<RrSchedule>(schedule), observer);
}

template <typename Scalar>
SolveOutcome<Scalar> solve_pbicgsafe_rr(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                                        const Vector<Scalar>& x0, const SolverConfig& config = {},
                                        const RrSchedule& schedule = {})
{
    ReductionEngine engine;
    return solve_pbicgsafe_rr(A, b, x0, config, schedule, engine);
}

}  // namespace bicgsafe
