#pragma once

#include "bicgsafe/types.hpp"

namespace bicgsafe {

/// Unfused scalar-multiply and vector-add counts (each in units of N) of one
/// update expression, tallied as the expression is written.
struct FlopTally {
    long scalar_mults = 0;
    long vec_adds = 0;

    FlopTally& operator+=(const FlopTally& o)
    {
        scalar_mults += o.scalar_mults;
        vec_adds += o.vec_adds;
        return *this;
    }
};

// Update kernels. Each evaluates its expression in a single elementwise pass
// and returns its tally. Output may alias any input of the same name.

/// y <- y + a x
template <typename Scalar>
FlopTally axpy(Scalar a, const Vector<Scalar>& x, Vector<Scalar>& y)
{
    require_same_size(x.size(), y.size(), "axpy");
    y += a * x;
    return {1, 1};
}

/// out <- x + a y
template <typename Scalar>
FlopTally add_scaled(Vector<Scalar>& out, const Vector<Scalar>& x, Scalar a, const Vector<Scalar>& y)
{
    require_same_size(x.size(), y.size(), "add_scaled");
    out = x + a * y;
    return {1, 1};
}

/// out <- x - y
template <typename Scalar>
FlopTally difference(Vector<Scalar>& out, const Vector<Scalar>& x, const Vector<Scalar>& y)
{
    require_same_size(x.size(), y.size(), "difference");
    out = x - y;
    return {0, 1};
}

/// p <- r + beta (p - u)
template <typename Scalar>
FlopTally update_direction(Vector<Scalar>& p, const Vector<Scalar>& r, Scalar beta,
                           const Vector<Scalar>& u)
{
    require_same_size(p.size(), r.size(), "update_direction");
    require_same_size(u.size(), r.size(), "update_direction");
    p = r + beta * (p - u);
    return {1, 2};
}

/// out <- x + a y + b z
template <typename Scalar>
FlopTally add_two_scaled(Vector<Scalar>& out, const Vector<Scalar>& x, Scalar a,
                         const Vector<Scalar>& y, Scalar b, const Vector<Scalar>& z)
{
    require_same_size(x.size(), y.size(), "add_two_scaled");
    require_same_size(x.size(), z.size(), "add_two_scaled");
    out = x + a * y + b * z;
    return {2, 2};
}

/// out <- x + a y + z
template <typename Scalar>
FlopTally add_scaled_and(Vector<Scalar>& out, const Vector<Scalar>& x, Scalar a,
                         const Vector<Scalar>& y, const Vector<Scalar>& z)
{
    require_same_size(x.size(), y.size(), "add_scaled_and");
    require_same_size(x.size(), z.size(), "add_scaled_and");
    out = x + a * y + z;
    return {1, 2};
}

/// out <- a x + b y + c z
template <typename Scalar>
FlopTally three_term(Vector<Scalar>& out, Scalar a, const Vector<Scalar>& x, Scalar b,
                     const Vector<Scalar>& y, Scalar c, const Vector<Scalar>& z)
{
    require_same_size(x.size(), y.size(), "three_term");
    require_same_size(x.size(), z.size(), "three_term");
    out = a * x + b * y + c * z;
    return {3, 2};
}

/// v <- a x + b (y + c v)
template <typename Scalar>
FlopTally nested_update(Vector<Scalar>& v, Scalar a, const Vector<Scalar>& x, Scalar b,
                        const Vector<Scalar>& y, Scalar c)
{
    require_same_size(v.size(), x.size(), "nested_update");
    require_same_size(v.size(), y.size(), "nested_update");
    v = a * x + b * (y + c * v);
    return {3, 2};
}

/// out <- x - a y - z
template <typename Scalar>
FlopTally subtract_scaled_and(Vector<Scalar>& out, const Vector<Scalar>& x, Scalar a,
                              const Vector<Scalar>& y, const Vector<Scalar>& z)
{
    require_same_size(x.size(), y.size(), "subtract_scaled_and");
    require_same_size(x.size(), z.size(), "subtract_scaled_and");
    out = x - a * y - z;
    return {1, 2};
}

}  // namespace bicgsafe
