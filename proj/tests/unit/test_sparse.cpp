#include "bsvem/error.hpp"
#include "bsvem/sparse.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace bsvem;
using namespace bsvem::linalg;

namespace {

SparseMatrix random_sparse(Index rows, Index cols, double density, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1), p(0, 1);
  std::vector<Triplet> t;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (p(rng) < density) t.push_back({i, j, u(rng)});
  return SparseMatrix::from_triplets(rows, cols, t);
}

}  // namespace

TEST(Sparse, FromTripletsSumsAndDropsZeros) {
  const auto a = SparseMatrix::from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {1, 1, 1.0}, {1, 1, -1.0}});
  EXPECT_EQ(a.nnz(), 2);
  EXPECT_DOUBLE_EQ(a.coeff(0, 2), 4.0);
  EXPECT_DOUBLE_EQ(a.coeff(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(a.coeff(1, 1), 0.0);
  EXPECT_EQ(a.col_indices(), (std::vector<Index>{0, 2}));
}

TEST(Sparse, IdentitySpmv) {
  Vector x(3);
  x << 1.5, -2, 7;
  EXPECT_EQ(spmv(SparseMatrix::identity(3), x), x);
}

TEST(Sparse, SpmvMatchesDenseOracle) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_sparse(20, 20, 0.3, rng);
    const Vector x = Vector::Random(20);
    const DenseMatrix d = a.to_dense();
    Vector y = Vector::Zero(20);
    for (Index i = 0; i < 20; ++i)
      for (Index j = 0; j < 20; ++j) y(i) += d(i, j) * x(j);
    EXPECT_LE((spmv(a, x) - y).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Sparse, ShapeMismatch) {
  EXPECT_THROW(spmv(SparseMatrix::identity(3), Vector::Zero(2)), ShapeError);
  EXPECT_THROW(add_scaled(SparseMatrix::identity(3), SparseMatrix::identity(2), 1.0), ShapeError);
}

TEST(Sparse, AddScaled) {
  std::mt19937 rng(2);
  const auto a = random_sparse(8, 6, 0.4, rng), b = random_sparse(8, 6, 0.4, rng);
  const auto c = add_scaled(a, b, -0.5);
  EXPECT_LE((c.to_dense() - (a.to_dense() - 0.5 * b.to_dense())).cwiseAbs().maxCoeff(), 1e-15);
  // a + (-1) a drops every entry.
  EXPECT_EQ(add_scaled(a, a, -1.0).nnz(), 0);
}

TEST(Sparse, TransposeAndSymmetry) {
  std::mt19937 rng(4);
  const auto a = random_sparse(7, 5, 0.5, rng);
  EXPECT_EQ(a.transpose().to_dense(), DenseMatrix(a.to_dense().transpose()));
  EXPECT_TRUE(a.transpose().transpose() == a);
  const auto s = add_scaled(SparseMatrix::from_eigen(a.to_eigen() * a.to_eigen().transpose()), SparseMatrix::identity(7), 1.0);
  EXPECT_TRUE(s.is_symmetric());
  EXPECT_FALSE(SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}}).is_symmetric());
}

TEST(Sparse, BlockAssembleHandLayout) {
  BlockSystem sys;
  sys.bulk_bulk = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 2}, {1, 0, 3}, {1, 1, 4}});
  sys.bulk_surface = SparseMatrix::from_triplets(2, 1, {{0, 0, 5}, {1, 0, 6}});
  sys.surface_bulk = SparseMatrix::from_triplets(1, 2, {{0, 0, 7}, {0, 1, 8}});
  sys.surface_surface = SparseMatrix::from_triplets(1, 1, {{0, 0, 9}});
  sys.rhs_bulk = Vector::Constant(2, 1.0);
  sys.rhs_surface = Vector::Constant(1, 2.0);
  DenseMatrix expected(3, 3);
  expected << 1, 2, 5, 3, 4, 6, 7, 8, 9;
  EXPECT_EQ(block_assemble(sys).to_dense(), expected);
  EXPECT_EQ(block_rhs(sys), (Vector(3) << 1, 1, 2).finished());
  sys.surface_surface = SparseMatrix::identity(2);
  EXPECT_THROW(block_assemble(sys), ShapeError);
}

TEST(Sparse, MatrixMarketRoundTrip) {
  std::mt19937 rng(9);
  const auto a = random_sparse(12, 9, 0.3, rng);
  const auto path = std::filesystem::temp_directory_path() / "bsvem_mm_roundtrip.mtx";
  write_matrix_market(a, path);
  EXPECT_TRUE(read_matrix_market(path) == a);
}
