#pragma once

#include "bicgsafe/solver_context.hpp"

namespace bicgsafe {

/// Two-parameter stabilization: minimizes ||t - eta y - zeta At||.
struct GpbicgCoefficients {
    template <typename Scalar>
    ZetaEta<Scalar> operator()(Scalar a, Scalar b, Scalar c, Scalar d, Scalar e, bool first) const
    {
        return compute_zeta_eta_gpbicg(a, b, c, d, e, first);
    }
};

/// eta = 0, zeta = (At,t)/(At,At). Turns GPBi-CG into BiCGStab.
struct BiCGStabCoefficients {
    template <typename Scalar>
    ZetaEta<Scalar> operator()(Scalar, Scalar b, Scalar, Scalar, Scalar e, bool) const
    {
        return compute_zeta_eta_gpbicg(Scalar(0), b, Scalar(0), Scalar(0), e, true);
    }
};

/// GPBi-CG with three reduction phases per iteration: after Ap, after At, and on r_{i+1}.
template <typename Scalar, typename Coefficients = GpbicgCoefficients>
SolveOutcome<Scalar> solve_gpbicg(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                                  const Vector<Scalar>& x0, const SolverConfig& config,
                                  ReductionEngine& engine, Coefficients coefficients = {})
{
    SolverContext<Scalar> ctx(Method::GPBiCG, A, b, config, engine);
    require_same_size(x0.size(), A.rows(), "initial guess");
    const Index n = ctx.n();

    Vector<Scalar> x = x0;
    Vector<Scalar> r(n), rs(n), t(n), Ap(n), At(n);
    Vector<Scalar> p = ctx.zeros(), u = ctx.zeros(), w = ctx.zeros(), z = ctx.zeros();
    Vector<Scalar> y = ctx.zeros(), t_prev = ctx.zeros();
    ctx.counters().set_workspace_vectors(12);

    return ctx.run(x, [&] {
        ctx.begin_iteration(kSetupIteration);
        ctx.spmv(x, Ap, "Ax0");
        ctx.tally(difference(r, b, Ap));
        rs = r;
        DotBatch<Scalar> init;
        init.add(DotLabel::r, r, r);
        Scalar rr = ctx.value(ctx.reduce(init).wait(), DotLabel::r);
        Scalar f = rr;
        ctx.set_initial_norm_squared(rr);

        Scalar beta(0);
        for (int i = 0;; ++i) {
            ctx.begin_iteration(i);
            if (ctx.check(ctx.relative(rr), x)) return SolveStatus::Converged;
            if (ctx.at_iteration_limit()) return SolveStatus::MaxIters;

            const Scalar beta_used = beta;
            ctx.tally(update_direction(p, r, beta, u));
            ctx.spmv(p, Ap, "Ap");
            DotBatch<Scalar> first;
            first.add(DotLabel::g, rs, Ap);
            const Scalar g = ctx.value(ctx.reduce(first).wait(), DotLabel::g);
            require_nonvanishing(g, std::abs(g), "(r0*,Ap)");
            const Scalar alpha = f / g;
            ctx.coefficients_ready();

            y = t_prev - r - alpha * w + alpha * Ap;
            ctx.tally({2, 3});
            ctx.tally(add_scaled(t, r, -alpha, Ap));
            ctx.spmv(t, At, "At");

            DotBatch<Scalar> second;
            second.add(DotLabel::a, y, y)
                .add(DotLabel::b, At, t)
                .add(DotLabel::c, y, t)
                .add(DotLabel::d, At, y)
                .add(DotLabel::e, At, At);
            auto phase2 = ctx.reduce(second);
            phase2.wait();
            const Scalar e = ctx.value(phase2, DotLabel::e);
            // At = 0 means t = 0 for a nonsingular A: x + alpha p is exact.
            const bool exact = e == Scalar(0);
            const auto ze = exact ? ZetaEta<Scalar>{Scalar(0), Scalar(0)}
                                  : coefficients(ctx.value(phase2, DotLabel::a),
                                                 ctx.value(phase2, DotLabel::b),
                                                 ctx.value(phase2, DotLabel::c),
                                                 ctx.value(phase2, DotLabel::d), e, i == 0);
            const Scalar zeta = ze.zeta;
            const Scalar eta = ze.eta;
            ctx.coefficients_ready();

            u = zeta * Ap + eta * (t_prev - r + beta * u);
            ctx.tally({3, 3});
            ctx.tally(three_term(z, zeta, r, eta, z, -alpha, u));
            ctx.tally(add_scaled_and(x, x, alpha, p, z));
            ctx.tally(three_term(r, Scalar(1), t, -eta, y, -zeta, At));

            DotBatch<Scalar> third;
            third.add(DotLabel::f, rs, r).add(DotLabel::r, r, r);
            auto phase3 = ctx.reduce(third);
            phase3.wait();
            const Scalar f_next = ctx.value(phase3, DotLabel::f);
            rr = ctx.value(phase3, DotLabel::r);
            if (exact) {
                beta = Scalar(0);
            } else {
                require_nonvanishing(zeta, std::abs(zeta), "zeta");
                require_nonvanishing(f, std::abs(f), "(r0*,r)");
                beta = (alpha / zeta) * (f_next / f);
            }
            f = f_next;
            ctx.coefficients_ready();

            ctx.tally(add_scaled(w, At, beta, Ap));
            t_prev = t;
            ctx.set_coefficients({alpha, beta_used, zeta, eta, Scalar(0)});
        }
    });
}

template <typename Scalar>
SolveOutcome<Scalar> solve_gpbicg(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                                  const Vector<Scalar>& x0, const SolverConfig& config = {})
{
    ReductionEngine engine;
    return solve_gpbicg(A, b, x0, config, engine);
}

}  // namespace bicgsafe
