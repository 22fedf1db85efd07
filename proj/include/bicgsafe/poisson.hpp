#pragma once

#include <array>
#include <limits>
#include <stdexcept>

#include "bicgsafe/csr_matrix.hpp"

namespace bicgsafe {

/**
 * Finite-difference Laplacian on a `points_per_axis`^dim grid with Dirichlet
 * boundaries: 2*dim on the diagonal, -1 for each grid neighbour (3, 5 or
 * 7-point stencil). Symmetric positive definite.
 */
template <typename Scalar = double>
CsrMatrix<Scalar> gen_poisson(int dim, Index points_per_axis)
{
    if (dim < 1 || dim > 3) throw std::invalid_argument("poisson dimension must be 1, 2 or 3");
    if (points_per_axis < 2) throw std::invalid_argument("poisson needs at least 2 points per axis");

    constexpr Index max_index = std::numeric_limits<Index>::max();
    Index n = 1;
    for (int d = 0; d < dim; ++d) {
        if (n > max_index / points_per_axis) throw std::overflow_error("poisson grid size overflows");
        n *= points_per_axis;
    }
    const Index stencil = 2 * dim + 1;
    if (n > max_index / stencil) throw std::overflow_error("poisson nnz overflows");

    const Index k = points_per_axis;
    const std::array<Index, 3> stride{1, k, k * k};

    std::vector<Index> row_ptr{0};
    std::vector<Index> col_idx;
    std::vector<Scalar> values;
    row_ptr.reserve(static_cast<std::size_t>(n) + 1);
    col_idx.reserve(static_cast<std::size_t>(n * stencil));
    values.reserve(static_cast<std::size_t>(n * stencil));

    for (Index row = 0; row < n; ++row) {
        std::array<Index, 3> coord{};
        for (int d = 0; d < dim; ++d) coord[d] = (row / stride[d]) % k;
        // Emit in ascending column order: far-lower neighbours first.
        for (int d = dim - 1; d >= 0; --d) {
            if (coord[d] > 0) {
                col_idx.push_back(row - stride[d]);
                values.push_back(Scalar(-1));
            }
        }
        col_idx.push_back(row);
        values.push_back(Scalar(2 * dim));
        for (int d = 0; d < dim; ++d) {
            if (coord[d] + 1 < k) {
                col_idx.push_back(row + stride[d]);
                values.push_back(Scalar(-1));
            }
        }
        row_ptr.push_back(static_cast<Index>(col_idx.size()));
    }
    return CsrMatrix<Scalar>(n, n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

}  // namespace bicgsafe
