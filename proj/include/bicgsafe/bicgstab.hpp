#pragma once

#include "bicgsafe/solver_context.hpp"

namespace bicgsafe {

/**
 * BiCGStab with two reduction phases per iteration.
 *
 * Phase one (after Ap) carries (r0*, Ap) and (r, r); the convergence test of
 * iteration i therefore runs once Ap_i is known. Phase two (after At) carries
 * (At, t), (At, At) and (r0*, At). The next (r0*, r) follows from
 *
 *   (r0*, r_{i+1}) = (r0*, t_i) - omega (r0*, At_i),  (r0*, t_i) = 0,
 *
 * which holds because alpha_i makes t_i orthogonal to r0*.
 */
template <typename Scalar>
SolveOutcome<Scalar> solve_bicgstab(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                                    const Vector<Scalar>& x0, const SolverConfig& config,
                                    ReductionEngine& engine)
{
    SolverContext<Scalar> ctx(Method::BiCGStab, A, b, config, engine);
    require_same_size(x0.size(), A.rows(), "initial guess");
    const Index n = ctx.n();

    Vector<Scalar> x = x0;
    Vector<Scalar> r(n), rs(n), p = ctx.zeros(), t(n), Ap(n), At(n);
    ctx.counters().set_workspace_vectors(7);

    return ctx.run(x, [&] {
        ctx.begin_iteration(kSetupIteration);
        ctx.spmv(x, Ap, "Ax0");
        ctx.tally(difference(r, b, Ap));
        rs = r;
        DotBatch<Scalar> init;
        init.add(DotLabel::r, r, r);
        Scalar f = ctx.value(ctx.reduce(init).wait(), DotLabel::r);
        ctx.set_initial_norm_squared(f);

        Scalar alpha(0), beta(0), omega(0);
        for (int i = 0;; ++i) {
            ctx.begin_iteration(i);
            const Scalar beta_used = beta;
            if (i == 0) {
                p = r;
            } else {
                ctx.tally(add_two_scaled(p, r, beta, p, -beta * omega, Ap));
            }
            ctx.spmv(p, Ap, "Ap");

            DotBatch<Scalar> first;
            first.add(DotLabel::g, rs, Ap).add(DotLabel::r, r, r);
            auto phase1 = ctx.reduce(first);
            phase1.wait();
            const Scalar rr = ctx.value(phase1, DotLabel::r);
            if (ctx.check(ctx.relative(rr), x)) return SolveStatus::Converged;
            if (ctx.at_iteration_limit()) return SolveStatus::MaxIters;

            const Scalar g = ctx.value(phase1, DotLabel::g);
            require_nonvanishing(g, std::abs(g), "(r0*,Ap)");
            alpha = f / g;
            ctx.coefficients_ready();

            ctx.tally(add_scaled(t, r, -alpha, Ap));
            ctx.spmv(t, At, "At");

            DotBatch<Scalar> second;
            second.add(DotLabel::b, At, t).add(DotLabel::e, At, At).add(DotLabel::h, rs, At);
            auto phase2 = ctx.reduce(second);
            phase2.wait();
            const Scalar bt = ctx.value(phase2, DotLabel::b);
            const Scalar e = ctx.value(phase2, DotLabel::e);
            const Scalar h = ctx.value(phase2, DotLabel::h);

            if (e == Scalar(0)) {
                // At = 0 means t = 0 for a nonsingular A: x + alpha p is exact.
                omega = Scalar(0);
                ctx.tally(axpy(alpha, p, x));
                r = t;
                beta = Scalar(0);
            } else {
                omega = bt / e;
                ctx.tally(add_two_scaled(x, x, alpha, p, omega, t));
                ctx.tally(add_scaled(r, t, -omega, At));
                require_nonvanishing(omega, std::abs(omega), "omega");
                require_nonvanishing(f, std::abs(f), "(r0*,r)");
                const Scalar f_next = -omega * h;
                beta = (alpha / omega) * (f_next / f);
                f = f_next;
            }
            ctx.coefficients_ready();
            ctx.set_coefficients({alpha, beta_used, omega, Scalar(0), omega});
        }
    });
}

template <typename Scalar>
SolveOutcome<Scalar> solve_bicgstab(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                                    const Vector<Scalar>& x0, const SolverConfig& config = {})
{
    ReductionEngine engine;
    return solve_bicgstab(A, b, x0, config, engine);
}

}  // namespace bicgsafe
