#pragma once

#include <span>
#include <string>
#include <vector>

#include "bicgsafe/event_log.hpp"
#include "bicgsafe/method.hpp"

namespace bicgsafe {

struct PhaseViolation {
    int iter = 0;
    std::string what;
};

struct PhaseReport {
    bool ok = true;
    /// Distinct solver iterations seen (setup and monitoring events excluded).
    int iterations = 0;
    int reduce_starts = 0;
    /// Iterations whose reduction was in flight while the "As" product ran concurrently.
    int overlapped_iterations = 0;
    bool sequential_fallback = false;
    std::vector<PhaseViolation> violations;

    std::string summary() const;
};

/**
 * Checks the per-iteration phase structure of a solve's event log:
 *
 *   p-BiCGSafe(-rr)  one reduction, started before the "As" product ends
 *   ssBiCGSafe2      one reduction, started after the "Ar" product ends
 *   BiCGStab         two reductions, after "Ap" and after "At" (one on the final check)
 *   GPBi-CG          three reductions, after "Ap", after "At", and after the r update
 *
 * plus start-before-end pairing for every reduction and product. Events of the
 * setup iteration and "monitor" tags are ignored.
 */
PhaseReport verify_phase_order(std::span<const ExecutionEvent> events, Method method);

}  // namespace bicgsafe
