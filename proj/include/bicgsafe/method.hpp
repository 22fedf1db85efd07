#pragma once

#include <optional>
#include <string_view>

namespace bicgsafe {

enum class Method { BiCGStab, GPBiCG, SsBiCGSafe2, PBiCGSafe, PBiCGSafeRR };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

}  // namespace bicgsafe
