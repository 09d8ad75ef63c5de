#include <gtest/gtest.h>

#include "itersolve/matrix.hpp"
#include "test_support.hpp"

using namespace itersolve;
using namespace itersolve::testing;

TEST(Matrix, RejectsWrongEntryCountAndNonFinite) {
  EXPECT_THROW(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), InvalidArgument);
  EXPECT_THROW(DenseMatrix(1, 2, {1.0, std::nan("")}), InvalidArgument);
  EXPECT_THROW((DenseMatrix{{1.0, 2.0}, {3.0}}), InvalidArgument);
}

TEST(Matrix, SparseValidatesStructure) {
  EXPECT_THROW(SparseMatrix(2, 2, {0, 1, 1}, {0, 1}, {1.0, 2.0}), InvalidArgument);  // offsets end != nnz
  EXPECT_THROW(SparseMatrix(1, 3, {0, 2}, {2, 1}, {1.0, 2.0}), InvalidArgument);     // unsorted row
  EXPECT_THROW(SparseMatrix(1, 2, {0, 1}, {2}, {1.0}), InvalidArgument);            // column out of range
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}), InvalidArgument);
  const auto s = SparseMatrix::from_triplets(2, 3, {{1, 2, 4.0}, {0, 1, 3.0}, {1, 0, 5.0}});
  EXPECT_EQ(s.nnz(), 3u);
  EXPECT_EQ(s.at(1, 0), 5.0);
  EXPECT_EQ(s.at(1, 2), 4.0);
  EXPECT_EQ(s.at(0, 0), 0.0);
}

TEST(Matrix, SparseKeepsExplicitZerosFromCaller) {
  const auto s = SparseMatrix::from_triplets(2, 2, {{0, 0, 0.0}, {1, 1, 2.0}});
  EXPECT_EQ(s.nnz(), 2u);
  EXPECT_EQ(SparseMatrix::from_dense(to_dense(s)).nnz(), 1u);
}

TEST(Matvec, IdentityAndRowSums) {
  EXPECT_EQ(matvec(DenseMatrix::identity(3), Vector{4, 5, 6}), (Vector{4, 5, 6}));
  EXPECT_EQ(matvec(worked3x3_matrix(), Vector{1, 1, 1}), (Vector{6, 7, -10}));
}

TEST(Matvec, RingTimesOnesIsZero) {
  for (std::size_t n : {3u, 7u, 32u}) {
    const auto r = matvec(ring_matrix(n), Vector(n, 1.0));
    for (double v : r) EXPECT_EQ(v, 0.0);
  }
}

TEST(Matvec, DimensionMismatchNamesBoth) {
  try {
    matvec(DenseMatrix(2, 3), Vector{1, 2});
    FAIL() << "expected a dimension error";
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2x3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("length 2"), std::string::npos) << msg;
  }
}

TEST(Split, IdentityHasNoOffDiagonal) {
  const auto s = split_dlu(DenseMatrix::identity(2));
  EXPECT_EQ(s.diag, (Vector{1, 1}));
  EXPECT_EQ(s.strict_lower.nnz(), 0u);
  EXPECT_EQ(s.strict_upper.nnz(), 0u);
}

TEST(Split, WorkedExampleUsesNegatedParts) {
  const auto s = split_dlu(worked3x3_matrix());
  EXPECT_EQ(s.diag, (Vector{5, 9, -7}));
  EXPECT_EQ(to_dense(s.strict_lower), (DenseMatrix{{0, 0, 0}, {3, 0, 0}, {2, 1, 0}}));
  EXPECT_EQ(to_dense(s.strict_upper), (DenseMatrix{{0, 2, -3}, {0, 0, -1}, {0, 0, 0}}));
}

TEST(Split, RejectsNonSquareAndAllowsZeroDiagonal) {
  EXPECT_THROW(split_dlu(DenseMatrix(2, 3)), InvalidArgument);
  const auto s = split_dlu(DenseMatrix{{0, 1}, {1, 0}});
  EXPECT_EQ(s.diag, (Vector{0, 0}));
}

TEST(Split, Random8x8RoundTripIsExact) {
  for_all(20, 11, [](auto& rng, std::size_t) {
    const auto a = random_dense(rng, 8, 8);
    EXPECT_EQ(recompose(split_dlu(a)), a);
  });
}

TEST(Gram, IdentityAndReducedRings) {
  EXPECT_EQ(gram(DenseMatrix::identity(3)), DenseMatrix::identity(3));

  const auto r4 = ring_matrix(4);
  std::vector<double> dropped;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) dropped.push_back(r4(i, j));
  EXPECT_EQ(gram(DenseMatrix(4, 3, dropped)), (DenseMatrix{{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}}));

  const auto r32 = ring_matrix(32);
  std::vector<double> d32;
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 31; ++j) d32.push_back(r32(i, j));
  const auto g = gram(SparseMatrix::from_dense(DenseMatrix(32, 31, d32)));
  ASSERT_EQ(g.rows(), 31u);
  for (std::size_t i = 0; i < 31; ++i) {
    for (std::size_t j = 0; j < 31; ++j) {
      const double expect = i == j ? 2.0 : (i + 1 == j || j + 1 == i) ? -1.0 : 0.0;
      EXPECT_EQ(g(i, j), expect) << "row " << i << " col " << j;
    }
  }
}

TEST(Gram, RhsIsTransposeProduct) {
  const DenseMatrix a{{1, 2}, {3, 4}, {5, 6}};
  EXPECT_EQ(gram_rhs(a, Vector{1, 1, 1}), (Vector{9, 12}));
  EXPECT_THROW(gram_rhs(a, Vector{1, 1}), InvalidArgument);
}

TEST(Norms, BasicValues) {
  EXPECT_EQ(norm2(Vector{3, 4}), 5.0);
  EXPECT_EQ(inf_norm(DenseMatrix::identity(6)), 1.0);
  for (std::size_t n : {3u, 10u, 31u}) EXPECT_EQ(inf_norm(tridiag(n, -1, 2, -1)), 4.0);
  EXPECT_EQ(inf_norm(worked3x3_matrix()), 13.0);
}
