#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bicgsafe/csr_matrix.hpp"

namespace bicgsafe::testing {

/// Seeded source for the hand-rolled generators below.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    Index index(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    Vector<double> vector(Index n, double lo = -1.0, double hi = 1.0)
    {
        Vector<double> v(n);
        for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    /// Random triplets, duplicates allowed.
    std::vector<Triplet<double>> triplets(Index rows, Index cols, Index count)
    {
        std::vector<Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(count));
        for (Index k = 0; k < count; ++k)
            t.push_back({index(0, rows - 1), index(0, cols - 1), uniform()});
        return t;
    }

    /// Diagonally dominant nonsymmetric matrix with `per_row` off-diagonals per row.
    CsrMatrix<double> dominant(Index n, Index per_row)
    {
        std::vector<Triplet<double>> t;
        for (Index i = 0; i < n; ++i) {
            double sum = 0.0;
            for (Index k = 0; k < per_row; ++k) {
                const Index j = index(0, n - 1);
                if (j == i) continue;
                const double v = uniform();
                sum += std::abs(v);
                t.push_back({i, j, v});
            }
            t.push_back({i, i, sum + 1.0 + uniform(0.0, 1.0)});
        }
        return CsrMatrix<double>::from_triplets(n, n, t);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Accumulates y = A x straight from triplets, independent of the CSR code.
inline Vector<double> triplet_oracle(Index rows, const std::vector<Triplet<double>>& t,
                                     const Vector<double>& x)
{
    std::vector<long double> acc(static_cast<std::size_t>(rows), 0.0L);
    for (const auto& e : t) acc[static_cast<std::size_t>(e.row)] += static_cast<long double>(e.value) * x[e.col];
    Vector<double> y(rows);
    for (Index i = 0; i < rows; ++i) y[i] = static_cast<double>(acc[static_cast<std::size_t>(i)]);
    return y;
}

inline std::optional<std::filesystem::path> suite_matrix(const std::string& name)
{
    const std::filesystem::path p = std::filesystem::path(BICGSAFE_MATRIX_DIR) / (name + ".mtx");
    if (std::filesystem::exists(p)) return p;
    return std::nullopt;
}

inline double rel_diff(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace bicgsafe::testing
