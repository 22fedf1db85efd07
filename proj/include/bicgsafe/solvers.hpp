#pragma once

#include "bicgsafe/bicgstab.hpp"
#include "bicgsafe/gpbicg.hpp"
#include "bicgsafe/pbicgsafe.hpp"
#include "bicgsafe/ssbicgsafe2.hpp"

namespace bicgsafe {

/// Runs `method`; the schedule is used by p-BiCGSafe-rr only.
template <typename Scalar>
SolveOutcome<Scalar> solve(Method method, const CsrMatrix<Scalar>& A, const Vector<Scalar>& b,
                           const Vector<Scalar>& x0, const SolverConfig& config,
                           ReductionEngine& engine, const RrSchedule& schedule = {})
{
    switch (method) {
    case Method::BiCGStab: return solve_bicgstab(A, b, x0, config, engine);
    case Method::GPBiCG: return solve_gpbicg(A, b, x0, config, engine);
    case Method::SsBiCGSafe2: return solve_ssbicgsafe2(A, b, x0, config, engine);
    case Method::PBiCGSafe: return solve_pbicgsafe(A, b, x0, config, engine);
    case Method::PBiCGSafeRR: return solve_pbicgsafe_rr(A, b, x0, config, schedule, engine);
    }
    throw std::invalid_argument("unknown method");
}

}  // namespace bicgsafe
