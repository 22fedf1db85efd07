#include "bicgsafe/instrument.hpp"

#include <algorithm>

namespace bicgsafe {

OpCounters& OpCounters::operator+=(const OpCounters& o)
{
    n_spmv += o.n_spmv;
    n_reduction_phases += o.n_reduction_phases;
    n_dots += o.n_dots;
    n_scalar_mults += o.n_scalar_mults;
    n_vec_adds += o.n_vec_adds;
    n_workspace_vectors += o.n_workspace_vectors;
    n_monitor_spmv += o.n_monitor_spmv;
    n_monitor_dots += o.n_monitor_dots;
    return *this;
}

OpCounters operator-(OpCounters a, const OpCounters& b)
{
    a.n_spmv -= b.n_spmv;
    a.n_reduction_phases -= b.n_reduction_phases;
    a.n_dots -= b.n_dots;
    a.n_scalar_mults -= b.n_scalar_mults;
    a.n_vec_adds -= b.n_vec_adds;
    a.n_workspace_vectors -= b.n_workspace_vectors;
    a.n_monitor_spmv -= b.n_monitor_spmv;
    a.n_monitor_dots -= b.n_monitor_dots;
    return a;
}

void CounterLog::begin_iteration(int iter)
{
    if (iter < 0) {
        current_ = kSetupIteration;
        return;
    }
    if (per_iter_.size() <= static_cast<std::size_t>(iter)) per_iter_.resize(static_cast<std::size_t>(iter) + 1);
    current_ = iter;
}

std::optional<ReferenceCosts> reference_costs(Method m)
{
    switch (m) {
    case Method::BiCGStab: return ReferenceCosts{2, 6, 6, 5, 7, 2};
    case Method::SsBiCGSafe2: return ReferenceCosts{2, 16, 14, 9, 10, 1};
    case Method::PBiCGSafe:
    case Method::PBiCGSafeRR: return ReferenceCosts{2, 26, 22, 9, 15, 1};
    case Method::GPBiCG: return std::nullopt;
    }
    return std::nullopt;
}

namespace {

bool same_algorithmic_work(const OpCounters& a, const OpCounters& b)
{
    return a.n_spmv == b.n_spmv && a.n_reduction_phases == b.n_reduction_phases &&
           a.n_dots == b.n_dots && a.n_scalar_mults == b.n_scalar_mults &&
           a.n_vec_adds == b.n_vec_adds;
}

void expect(long actual, long expected, const char* counter, Method m)
{
    if (actual != expected) {
        throw CostMismatch(std::string(to_string(m)) + ": steady-state " + counter + " is " +
                           std::to_string(actual) + ", expected " + std::to_string(expected));
    }
}

}  // namespace

CostRow per_iteration_costs(const CounterLog& counters, Method method)
{
    CostRow row;
    row.method = method;
    row.reference = reference_costs(method);

    const auto& iters = counters.per_iteration();
    if (!iters.empty()) row.first = iters.front();

    const auto terminal = counters.terminal();
    const auto& irregular = counters.irregular();
    std::optional<OpCounters> steady;
    int steady_first = -1;
    for (std::size_t i = 1; i < iters.size(); ++i) {
        const int it = static_cast<int>(i);
        if (terminal && *terminal == it) continue;
        if (std::find(irregular.begin(), irregular.end(), it) != irregular.end()) continue;
        if (!steady) {
            steady = iters[i];
            steady_first = it;
        } else if (!same_algorithmic_work(*steady, iters[i])) {
            throw CostMismatch(std::string(to_string(method)) + ": iteration " + std::to_string(it) +
                               " does different work than iteration " + std::to_string(steady_first));
        }
        ++row.steady_iterations;
    }
    if (row.steady_iterations < 2) {
        throw CostMismatch(std::string(to_string(method)) +
                           ": need at least 2 steady-state iterations, have " +
                           std::to_string(row.steady_iterations));
    }
    row.steady = *steady;
    row.steady.n_workspace_vectors = counters.totals().n_workspace_vectors;

    if (row.reference) {
        expect(row.steady.n_spmv, row.reference->n_spmv, "#Ax", method);
        expect(row.steady.n_dots, row.reference->n_dots, "#dots", method);
        expect(row.steady.n_reduction_phases, row.reference->n_reduction_phases,
               "#reduction phases", method);
    }
    return row;
}

}  // namespace bicgsafe
