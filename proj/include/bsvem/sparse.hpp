#pragma once

#include "bsvem/types.hpp"

#include <Eigen/SparseCore>

#include <filesystem>
#include <vector>

namespace bsvem::linalg {

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Compressed-row matrix with strictly increasing column indices per row and
// no stored zeros.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols);

  // Duplicates are summed in input order, so equal inputs give bit-equal sums.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(Index n);
  static SparseMatrix from_eigen(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  const std::vector<Index>& row_offsets() const { return offsets_; }
  const std::vector<Index>& col_indices() const { return cols_idx_; }
  const std::vector<double>& values() const { return values_; }

  double coeff(Index i, Index j) const;
  SparseMatrix transpose() const;
  bool is_symmetric() const;
  DenseMatrix to_dense() const;
  Eigen::SparseMatrix<double> to_eigen() const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Index> cols_idx_;
  std::vector<double> values_;
};

Vector spmv(const SparseMatrix& a, const Vector& x);
SparseMatrix add_scaled(const SparseMatrix& a, const SparseMatrix& b, double c);
SparseMatrix scaled(const SparseMatrix& a, double c);

// [bb bs; sb ss] with bulk size N and surface size M.
struct BlockSystem {
  SparseMatrix bulk_bulk;
  SparseMatrix bulk_surface;
  SparseMatrix surface_bulk;
  SparseMatrix surface_surface;
  Vector rhs_bulk;
  Vector rhs_surface;
};

SparseMatrix block_assemble(const BlockSystem& sys);
Vector block_rhs(const BlockSystem& sys);

void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path);
SparseMatrix read_matrix_market(const std::filesystem::path& path);
void write_vector(const Vector& v, const std::filesystem::path& path);

}  // namespace bsvem::linalg
