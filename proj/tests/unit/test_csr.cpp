#include <gtest/gtest.h>

#include "bicgsafe/csr_matrix.hpp"
#include "bicgsafe/matrix_market.hpp"
#include "support.hpp"

using namespace bicgsafe;
using bicgsafe::testing::Gen;

TEST(Csr, IdentityProductIsInput)
{
    const auto I = CsrMatrix<double>::identity(3);
    const Vector<double> x = (Vector<double>(3) << 1, 2, 3).finished();
    EXPECT_EQ(spmv(I, x), x);
}

TEST(Csr, TridiagonalTimesOnes)
{
    const auto A = CsrMatrix<double>::from_triplets(
        3, 3, {{0, 0, 2}, {0, 1, -1}, {1, 0, -1}, {1, 1, 2}, {1, 2, -1}, {2, 1, -1}, {2, 2, 2}});
    const Vector<double> y = spmv(A, Vector<double>::Ones(3).eval());
    EXPECT_EQ(y, (Vector<double>(3) << 1, 0, 1).finished());
}

TEST(Csr, FromTripletsCanonicalizes)
{
    const auto A = CsrMatrix<double>::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {0, 1, 0.5}});
    EXPECT_EQ(A.nnz(), 3);
    EXPECT_EQ(A.coeff(0, 1), 2.5);
    const std::vector<Index> cols(A.col_idx().begin(), A.col_idx().end());
    EXPECT_EQ(cols, (std::vector<Index>{1, 0, 2}));
}

TEST(Csr, RejectsNonCanonicalLayout)
{
    EXPECT_THROW(CsrMatrix<double>(2, 2, {0, 2, 2}, {1, 0}, {1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(CsrMatrix<double>(2, 2, {0, 2, 2}, {0, 0}, {1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(CsrMatrix<double>(2, 2, {0, 1, 1}, {2}, {1.0}), std::out_of_range);
    EXPECT_THROW(CsrMatrix<double>(2, 2, {0, 1}, {0}, {1.0}), DimensionError);
    EXPECT_THROW(CsrMatrix<double>::from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
}

TEST(Csr, DimensionMismatch)
{
    const auto I = CsrMatrix<double>::identity(3);
    EXPECT_THROW(spmv(I, Vector<double>::Ones(4).eval()), DimensionError);
}

TEST(Csr, NonFiniteOutputNamesRow)
{
    const auto A = CsrMatrix<double>::from_triplets(3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
    Vector<double> x = Vector<double>::Ones(3).eval();
    x[1] = std::numeric_limits<double>::infinity();
    try {
        spmv(A, x);
        FAIL() << "expected NonFiniteError";
    } catch (const NonFiniteError& e) {
        EXPECT_EQ(e.row(), 1);
    }
}

TEST(Csr, MatchesEigenView)
{
    Gen gen(31);
    const auto A = gen.dominant(200, 6);
    const auto x = gen.vector(200);
    const Vector<double> ref = A.eigen() * x;
    const Vector<double> y = spmv(A, x);
    EXPECT_LE((y - ref).norm(), 1e-14 * ref.norm());
}

// Property: spmv equals an independent triplet accumulation for random shapes,
// densities and duplicate patterns.
TEST(CsrProperty, MatchesTripletOracle)
{
    Gen gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Index rows = gen.index(1, 60);
        const Index cols = gen.index(1, 60);
        const auto t = gen.triplets(rows, cols, gen.index(0, rows * cols));
        const auto A = CsrMatrix<double>::from_triplets(rows, cols, t);
        const auto x = gen.vector(cols);
        const auto ref = bicgsafe::testing::triplet_oracle(rows, t, x);
        const auto y = spmv(A, x);
        for (Index i = 0; i < rows; ++i) {
            double mag = 0.0;
            for (const auto& e : t)
                if (e.row == i) mag += std::abs(e.value * x[e.col]);
            ASSERT_LE(std::abs(y[i] - ref[i]), 1e-14 * mag + 1e-300) << "trial " << trial << " row " << i;
        }
    }
}

TEST(CsrProperty, MillionNonzerosMatchOracleAndAreDeterministic)
{
    Gen gen(99);
    const Index n = 100000;
    std::vector<Triplet<double>> t;
    t.reserve(1000000);
    for (Index i = 0; i < n; ++i)
        for (int k = 0; k < 10; ++k) t.push_back({i, gen.index(0, n - 1), gen.uniform()});
    const auto A = CsrMatrix<double>::from_triplets(n, n, t);
    const auto x = gen.vector(n);
    const auto ref = bicgsafe::testing::triplet_oracle(n, t, x);
    const auto y1 = spmv(A, x);
    double worst = 0.0;
    for (Index i = 0; i < n; ++i) {
        double mag = 0.0;
        for (Index k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
            mag += std::abs(A.values()[k] * x[A.col_idx()[k]]);
        if (mag > 0.0) worst = std::max(worst, std::abs(y1[i] - ref[i]) / mag);
    }
    EXPECT_LE(worst, 1e-14);

    const auto y2 = spmv(A, x);
    EXPECT_EQ(0, std::memcmp(y1.data(), y2.data(), sizeof(double) * static_cast<std::size_t>(n)));
}

TEST(CsrProperty, RowRangesComposeToFullProduct)
{
    Gen gen(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = gen.index(1, 80);
        const auto A = gen.dominant(n, 4);
        const auto x = gen.vector(n);
        const auto full = spmv(A, x);
        Vector<double> pieces(n);
        Index start = 0;
        while (start < n) {
            const Index end = std::min(n, start + gen.index(1, 17));
            spmv_rows(A, x, pieces, start, end);
            start = end;
        }
        ASSERT_EQ(full, pieces);
    }
}

TEST(CsrProperty, TransposeTwiceIsIdentity)
{
    Gen gen(17);
    for (int trial = 0; trial < 50; ++trial) {
        const Index r = gen.index(1, 30), c = gen.index(1, 30);
        const auto A = CsrMatrix<double>::from_triplets(r, c, gen.triplets(r, c, gen.index(0, 60)));
        ASSERT_EQ(A.transpose().transpose(), A);
    }
}

TEST(Csr, Norm1IsMaxColumnSum)
{
    const auto A = CsrMatrix<double>::from_triplets(2, 2, {{0, 0, 1}, {1, 0, -3}, {0, 1, 2}});
    EXPECT_EQ(norm1(A), 4.0);
}
