#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "bicgsafe/types.hpp"

namespace bicgsafe {

/// Relative size below which a denominator counts as vanished, measured
/// against the sum of magnitudes of the products it is built from.
inline constexpr double kBreakdownTolerance = 1e-14;

template <typename Scalar>
bool denominator_vanished(Scalar q, Scalar constituent_magnitude)
{
    using std::abs;
    return !(abs(q) > Scalar(kBreakdownTolerance) * constituent_magnitude) ||
           abs(q) < std::numeric_limits<Scalar>::min();
}

template <typename Scalar>
void require_nonvanishing(Scalar q, Scalar constituent_magnitude, const char* name)
{
    if (!std::isfinite(q)) throw NonFiniteError(std::string(name) + " is not finite", -1);
    if (denominator_vanished(q, constituent_magnitude)) throw BreakdownError(name);
}

template <typename Scalar>
struct ZetaEta {
    Scalar zeta;
    Scalar eta;
};

template <typename Scalar>
struct AlphaBeta {
    Scalar alpha;
    Scalar beta;
};

/**
 * Minimizer of ||r - zeta s - eta y|| given a=(s,s), b=(y,y), c=(s,y),
 * d=(s,r), e=(y,r). Solves
 *
 *   c zeta + b eta = e
 *   a zeta + c eta = d
 *
 * by Cramer's rule. A zero y (b = c = e = 0) reduces to the one-term fit
 * used on the first iteration.
 */
template <typename Scalar>
ZetaEta<Scalar> compute_zeta_eta_safe(Scalar a, Scalar b, Scalar c, Scalar d, Scalar e,
                                      bool first_iter)
{
    using std::abs;
    if (first_iter || (b == Scalar(0) && c == Scalar(0) && e == Scalar(0))) {
        require_nonvanishing(a, abs(a), "a");
        return {d / a, Scalar(0)};
    }
    const Scalar det = a * b - c * c;
    require_nonvanishing(det, abs(a * b) + c * c, "ab-c^2");
    return {(b * d - c * e) / det, (a * e - c * d) / det};
}

/// beta = (alpha_prev f) / (zeta_prev f_prev), alpha = f / (g + beta h).
template <typename Scalar>
AlphaBeta<Scalar> compute_alpha_beta_safe(Scalar f, Scalar f_prev, Scalar g, Scalar h,
                                          Scalar alpha_prev, Scalar zeta_prev, bool first_iter)
{
    using std::abs;
    if (first_iter) {
        require_nonvanishing(g, abs(g), "g");
        return {f / g, Scalar(0)};
    }
    const Scalar beta_den = zeta_prev * f_prev;
    require_nonvanishing(beta_den, abs(beta_den), "zeta_prev*f_prev");
    const Scalar beta = (alpha_prev * f) / beta_den;
    const Scalar alpha_den = g + beta * h;
    require_nonvanishing(alpha_den, abs(g) + abs(beta * h), "g+beta*h");
    return {f / alpha_den, beta};
}

/**
 * Minimizer of ||t - eta y - zeta At|| given a=(y,y), b=(At,t), c=(y,t),
 * d=(At,y), e=(At,At):
 *
 *   a eta + d zeta = c
 *   d eta + e zeta = b
 *
 * A zero y (a = c = d = 0) reduces to the first-iteration fit zeta = b/e.
 */
template <typename Scalar>
ZetaEta<Scalar> compute_zeta_eta_gpbicg(Scalar a, Scalar b, Scalar c, Scalar d, Scalar e,
                                        bool first_iter)
{
    using std::abs;
    if (first_iter || (a == Scalar(0) && c == Scalar(0) && d == Scalar(0))) {
        require_nonvanishing(e, abs(e), "e");
        return {b / e, Scalar(0)};
    }
    const Scalar det = e * a - d * d;
    require_nonvanishing(det, abs(e * a) + d * d, "ea-d^2");
    return {(a * b - c * d) / det, (e * c - d * b) / det};
}

}  // namespace bicgsafe
