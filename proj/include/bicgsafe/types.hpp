#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace bicgsafe {

using Index = std::int64_t;

/// Dense column vector used for every iterate and workspace vector.
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A consuming operation produced or met a NaN/Inf. `row()` is the offending
/// entry, or -1 when the quantity is a scalar.
class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string& what, Index row)
        : std::runtime_error(what), row_(row) {}
    Index row() const noexcept { return row_; }

private:
    Index row_;
};

/// A coefficient denominator vanished. `quantity()` names it.
class BreakdownError : public std::runtime_error {
public:
    explicit BreakdownError(std::string quantity)
        : std::runtime_error("breakdown: vanishing " + quantity),
          quantity_(std::move(quantity)) {}
    const std::string& quantity() const noexcept { return quantity_; }

private:
    std::string quantity_;
};

inline void require_same_size(Index a, Index b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": size " + std::to_string(a) +
                             " does not match " + std::to_string(b));
    }
}

}  // namespace bicgsafe
