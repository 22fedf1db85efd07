#pragma once

#include "bicgsafe/solver_context.hpp"

namespace bicgsafe {

namespace detail {

/// The single batch of the BiCGSafe family: five dots on the first iteration, nine after.
template <typename Scalar>
DotBatch<Scalar> safe_batch(const Vector<Scalar>& rs, const Vector<Scalar>& r,
                            const Vector<Scalar>& s, const Vector<Scalar>& y,
                            const Vector<Scalar>& t_prev, bool first)
{
    DotBatch<Scalar> batch;
    batch.add(DotLabel::a, s, s);
    if (!first) batch.add(DotLabel::b, y, y).add(DotLabel::c, s, y);
    batch.add(DotLabel::d, s, r);
    if (!first) batch.add(DotLabel::e, y, r);
    batch.add(DotLabel::f, rs, r).add(DotLabel::g, rs, s);
    if (!first) batch.add(DotLabel::h, rs, t_prev);
    batch.add(DotLabel::r, r, r);
    return batch;
}

template <typename Scalar>
struct SafeCoefficients {
    Scalar alpha{0};
    Scalar beta{0};
    Scalar zeta{0};
    Scalar eta{0};
    Scalar f{0};
};

/// Coefficients of one BiCGSafe iteration from its completed batch.
template <typename Scalar>
SafeCoefficients<Scalar> safe_coefficients(const ReductionTicket<Scalar>& dots,
                                           const SafeCoefficients<Scalar>& prev, bool first)
{
    using Ctx = SolverContext<Scalar>;
    const Scalar a = Ctx::value(dots, DotLabel::a);
    const Scalar d = Ctx::value(dots, DotLabel::d);
    const Scalar f = Ctx::value(dots, DotLabel::f);
    const Scalar g = Ctx::value(dots, DotLabel::g);
    const Scalar b = first ? Scalar(0) : Ctx::value(dots, DotLabel::b);
    const Scalar c = first ? Scalar(0) : Ctx::value(dots, DotLabel::c);
    const Scalar e = first ? Scalar(0) : Ctx::value(dots, DotLabel::e);
    const Scalar h = first ? Scalar(0) : Ctx::value(dots, DotLabel::h);

    const auto ab = compute_alpha_beta_safe(f, prev.f, g, h, prev.alpha, prev.zeta, first);
    const auto ze = compute_zeta_eta_safe(a, b, c, d, e, first);
    return {ab.alpha, ab.beta, ze.zeta, ze.eta, f};
}

}  // namespace detail

/// ssBiCGSafe2: one nine-dot reduction per iteration, issued after s = A r.
template <typename Scalar>
SolveOutcome<Scalar> solve_ssbicgsafe2(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                                       const Vector<Scalar>& x0, const SolverConfig& config,
                                       ReductionEngine& engine)
{
    SolverContext<Scalar> ctx(Method::SsBiCGSafe2, A, b, config, engine);
    require_same_size(x0.size(), A.rows(), "initial guess");
    const Index n = ctx.n();

    Vector<Scalar> x = x0;
    Vector<Scalar> r(n), rs(n), s(n), o(n), w(n);
    Vector<Scalar> p = ctx.zeros(), u = ctx.zeros(), t = ctx.zeros(), y = ctx.zeros(), z = ctx.zeros();
    ctx.counters().set_workspace_vectors(11);

    return ctx.run(x, [&] {
        ctx.begin_iteration(kSetupIteration);
        ctx.spmv(x, s, "Ax0");
        ctx.tally(difference(r, b, s));
        rs = r;

        detail::SafeCoefficients<Scalar> k;
        for (int i = 0;; ++i) {
            const bool first = i == 0;
            ctx.begin_iteration(i);
            ctx.spmv(r, s, "Ar");
            auto dots = ctx.reduce(detail::safe_batch(rs, r, s, y, t, first));
            dots.wait();
            const Scalar rr = ctx.value(dots, DotLabel::r);
            if (first) ctx.set_initial_norm_squared(rr);
            if (ctx.check(ctx.relative(rr), x)) return SolveStatus::Converged;
            if (ctx.at_iteration_limit()) return SolveStatus::MaxIters;

            k = detail::safe_coefficients(dots, k, first);
            ctx.coefficients_ready();
            ctx.set_coefficients({k.alpha, k.beta, k.zeta, k.eta, Scalar(0)});

            ctx.tally(update_direction(p, r, k.beta, u));
            ctx.tally(add_scaled(o, s, k.beta, t));
            ctx.tally(nested_update(u, k.zeta, o, k.eta, y, k.beta));
            ctx.spmv(u, w, "Au");
            ctx.tally(difference(t, o, w));
            ctx.tally(three_term(z, k.zeta, r, k.eta, z, -k.alpha, u));
            ctx.tally(three_term(y, k.zeta, s, k.eta, y, -k.alpha, w));
            ctx.tally(add_scaled_and(x, x, k.alpha, p, z));
            ctx.tally(subtract_scaled_and(r, r, k.alpha, o, y));
        }
    });
}

template <typename Scalar>
SolveOutcome<Scalar> solve_ssbicgsafe2(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                                       const Vector<Scalar>& x0, const SolverConfig& config = {})
{
    ReductionEngine engine;
    return solve_ssbicgsafe2(A, b, x0, config, engine);
}

}  // namespace bicgsafe
