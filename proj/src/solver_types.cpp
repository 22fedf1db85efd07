#include "bicgsafe/solver_types.hpp"

#include <array>
#include <utility>

namespace bicgsafe {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 5> kMethodNames{{
    {Method::BiCGStab, "bicgstab"},
    {Method::GPBiCG, "gpbicg"},
    {Method::SsBiCGSafe2, "ssbicgsafe2"},
    {Method::PBiCGSafe, "pbicgsafe"},
    {Method::PBiCGSafeRR, "pbicgsafe-rr"},
}};

}  // namespace

std::string_view to_string(Method m)
{
    for (const auto& [method, name] : kMethodNames)
        if (method == m) return name;
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name)
{
    for (const auto& [method, n] : kMethodNames)
        if (n == name) return method;
    return std::nullopt;
}

std::string_view to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::Breakdown: return "Breakdown";
    case SolveStatus::NonFinite: return "NonFinite";
    }
    return "Unknown";
}

}  // namespace bicgsafe
