#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "bicgsafe/types.hpp"

namespace bicgsafe {

template <typename Scalar>
struct Triplet {
    Index row;
    Index col;
    Scalar value;
};

/**
 * Compressed sparse row matrix in canonical form: column indices strictly
 * increasing within each row, no duplicates. Construction validates the
 * layout; the object is immutable afterwards.
 */
template <typename Scalar = double>
class CsrMatrix {
public:
    using scalar_type = Scalar;
    using EigenView =
        Eigen::Map<const Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Index>>;

    CsrMatrix() : row_ptr_{0} {}

    CsrMatrix(Index n_rows, Index n_cols, std::vector<Index> row_ptr,
              std::vector<Index> col_idx, std::vector<Scalar> values)
        : n_rows_(n_rows),
          n_cols_(n_cols),
          row_ptr_(std::move(row_ptr)),
          col_idx_(std::move(col_idx)),
          values_(std::move(values))
    {
        validate();
    }

    /// Sums duplicates and sorts; entries may arrive in any order.
    static CsrMatrix from_triplets(Index n_rows, Index n_cols,
                                   std::vector<Triplet<Scalar>> entries)
    {
        for (const auto& t : entries) {
            if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
                throw std::out_of_range("triplet (" + std::to_string(t.row) + ", " +
                                        std::to_string(t.col) + ") outside " +
                                        std::to_string(n_rows) + "x" +
                                        std::to_string(n_cols));
            }
        }
        std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        std::vector<Index> row_ptr(static_cast<std::size_t>(n_rows) + 1, 0);
        std::vector<Index> col_idx;
        std::vector<Scalar> values;
        col_idx.reserve(entries.size());
        values.reserve(entries.size());
        for (std::size_t k = 0; k < entries.size();) {
            const auto row = entries[k].row;
            const auto col = entries[k].col;
            Scalar sum = entries[k].value;
            for (++k; k < entries.size() && entries[k].row == row && entries[k].col == col; ++k) {
                sum += entries[k].value;
            }
            col_idx.push_back(col);
            values.push_back(sum);
            ++row_ptr[static_cast<std::size_t>(row) + 1];
        }
        std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
        return CsrMatrix(n_rows, n_cols, std::move(row_ptr), std::move(col_idx),
                         std::move(values));
    }

    static CsrMatrix identity(Index n)
    {
        std::vector<Triplet<Scalar>> t;
        t.reserve(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) t.push_back({i, i, Scalar(1)});
        return from_triplets(n, n, std::move(t));
    }

    Index rows() const noexcept { return n_rows_; }
    Index cols() const noexcept { return n_cols_; }
    Index nnz() const noexcept { return static_cast<Index>(values_.size()); }
    bool is_square() const noexcept { return n_rows_ == n_cols_; }

    std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
    std::span<const Index> col_idx() const noexcept { return col_idx_; }
    std::span<const Scalar> values() const noexcept { return values_; }

    /// Zero-copy view for Eigen expressions (`A.eigen() * x`, transposes, norms).
    EigenView eigen() const
    {
        return EigenView(n_rows_, n_cols_, nnz(), row_ptr_.data(), col_idx_.data(),
                         values_.data());
    }

    Scalar coeff(Index i, Index j) const
    {
        const auto first = col_idx_.begin() + row_ptr_[i];
        const auto last = col_idx_.begin() + row_ptr_[i + 1];
        const auto it = std::lower_bound(first, last, j);
        return (it != last && *it == j) ? values_[static_cast<std::size_t>(it - col_idx_.begin())]
                                        : Scalar(0);
    }

    std::vector<Triplet<Scalar>> to_triplets() const
    {
        std::vector<Triplet<Scalar>> out;
        out.reserve(values_.size());
        for (Index i = 0; i < n_rows_; ++i) {
            for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                out.push_back({i, col_idx_[k], values_[k]});
            }
        }
        return out;
    }

    CsrMatrix transpose() const
    {
        auto t = to_triplets();
        for (auto& e : t) std::swap(e.row, e.col);
        return from_triplets(n_cols_, n_rows_, std::move(t));
    }

    friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

private:
    void validate() const
    {
        if (n_rows_ < 0 || n_cols_ < 0) throw DimensionError("negative matrix dimension");
        if (row_ptr_.size() != static_cast<std::size_t>(n_rows_) + 1)
            throw DimensionError("row_ptr length must be n_rows + 1");
        if (row_ptr_.front() != 0) throw std::invalid_argument("row_ptr[0] must be 0");
        if (col_idx_.size() != values_.size() ||
            row_ptr_.back() != static_cast<Index>(col_idx_.size()))
            throw DimensionError("row_ptr[n_rows] must equal nnz");
        for (Index i = 0; i < n_rows_; ++i) {
            if (row_ptr_[i + 1] < row_ptr_[i])
                throw std::invalid_argument("row_ptr decreases at row " + std::to_string(i));
            for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                if (col_idx_[k] < 0 || col_idx_[k] >= n_cols_)
                    throw std::out_of_range("column index out of range in row " +
                                            std::to_string(i));
                if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
                    throw std::invalid_argument("row " + std::to_string(i) +
                                                " is not sorted/deduplicated");
            }
        }
    }

    Index n_rows_ = 0;
    Index n_cols_ = 0;
    std::vector<Index> row_ptr_;
    std::vector<Index> col_idx_;
    std::vector<Scalar> values_;
};

/// y[first:last) = (A x)[first:last). Each row sums in ascending column order.
template <typename Scalar>
void spmv_rows(const CsrMatrix<Scalar>& A, const Vector<Scalar>& x, Vector<Scalar>& y,
               Index first, Index last)
{
    const auto rp = A.row_ptr();
    const auto ci = A.col_idx();
    const auto va = A.values();
    for (Index i = first; i < last; ++i) {
        Scalar sum(0);
        for (Index k = rp[i]; k < rp[i + 1]; ++k) sum += va[k] * x[ci[k]];
        if (!std::isfinite(sum))
            throw NonFiniteError("spmv produced a non-finite value in row " + std::to_string(i), i);
        y[i] = sum;
    }
}

template <typename Scalar>
void spmv(const CsrMatrix<Scalar>& A, const Vector<Scalar>& x, Vector<Scalar>& y)
{
    require_same_size(x.size(), A.cols(), "spmv input");
    y.resize(A.rows());
    spmv_rows(A, x, y, 0, A.rows());
}

template <typename Scalar>
Vector<Scalar> spmv(const CsrMatrix<Scalar>& A, const Vector<Scalar>& x)
{
    Vector<Scalar> y(A.rows());
    spmv(A, x, y);
    return y;
}

/// Maximum absolute column sum.
template <typename Scalar>
Scalar norm1(const CsrMatrix<Scalar>& A)
{
    std::vector<Scalar> col_sum(static_cast<std::size_t>(A.cols()), Scalar(0));
    const auto ci = A.col_idx();
    const auto va = A.values();
    for (std::size_t k = 0; k < va.size(); ++k) col_sum[ci[k]] += std::abs(va[k]);
    return col_sum.empty() ? Scalar(0) : *std::max_element(col_sum.begin(), col_sum.end());
}

template <typename Scalar>
bool is_symmetric(const CsrMatrix<Scalar>& A)
{
    return A.is_square() && A == A.transpose();
}

}  // namespace bicgsafe
