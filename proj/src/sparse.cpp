#include "bsvem/sparse.hpp"

#include "bsvem/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

namespace bsvem::linalg {

namespace {

void check_dims(Index rows, Index cols) {
  if (rows < 0 || cols < 0) throw ShapeError("negative matrix dimension");
}

std::string shape(const SparseMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

}  // namespace

SparseMatrix::SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {
  check_dims(rows, cols);
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
  check_dims(rows, cols);
  for (const auto& t : triplets)
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw ShapeError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) + ") outside " +
                       std::to_string(rows) + "x" + std::to_string(cols));
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  SparseMatrix m(rows, cols);
  std::size_t k = 0;
  for (Index r = 0; r < rows; ++r) {
    while (k < triplets.size() && triplets[k].row == r) {
      const Index c = triplets[k].col;
      double sum = 0.0;
      for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) sum += triplets[k].value;
      if (sum != 0.0) {
        m.cols_idx_.push_back(c);
        m.values_.push_back(sum);
      }
    }
    m.offsets_[r + 1] = static_cast<Index>(m.values_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_eigen(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a) {
  std::vector<Triplet> t;
  for (Index r = 0; r < a.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a, r); it; ++it)
      t.push_back({static_cast<Index>(it.row()), static_cast<Index>(it.col()), it.value()});
  return from_triplets(static_cast<Index>(a.rows()), static_cast<Index>(a.cols()), std::move(t));
}

double SparseMatrix::coeff(Index i, Index j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw ShapeError("coeff: index outside " + shape(*this));
  const auto b = cols_idx_.begin() + offsets_[i];
  const auto e = cols_idx_.begin() + offsets_[i + 1];
  const auto it = std::lower_bound(b, e, j);
  return (it != e && *it == j) ? values_[static_cast<std::size_t>(it - cols_idx_.begin())] : 0.0;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  std::vector<Index> count(cols_ + 1, 0);
  for (Index c : cols_idx_) ++count[c + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  t.offsets_ = count;
  t.cols_idx_.resize(values_.size());
  t.values_.resize(values_.size());
  std::vector<Index> fill(count.begin(), count.end() - 1);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      const Index pos = fill[cols_idx_[k]]++;
      t.cols_idx_[pos] = r;
      t.values_[pos] = values_[k];
    }
  return t;
}

bool SparseMatrix::is_symmetric() const { return rows_ == cols_ && *this == transpose(); }

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(rows_, cols_);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = offsets_[r]; k < offsets_[r + 1]; ++k) d(r, cols_idx_[k]) = values_[k];
  return d;
}

Eigen::SparseMatrix<double> SparseMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(values_.size());
  for (Index r = 0; r < rows_; ++r)
    for (Index k = offsets_[r]; k < offsets_[r + 1]; ++k) t.emplace_back(r, cols_idx_[k], values_[k]);
  Eigen::SparseMatrix<double> a(rows_, cols_);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

Vector spmv(const SparseMatrix& a, const Vector& x) {
  if (x.size() != a.cols())
    throw ShapeError("spmv: " + shape(a) + " times vector of length " + std::to_string(x.size()));
  Vector y(a.rows());
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (Index r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (Index k = off[r]; k < off[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
  return y;
}

SparseMatrix add_scaled(const SparseMatrix& a, const SparseMatrix& b, double c) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("add_scaled: " + shape(a) + " vs " + shape(b));
  std::vector<Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (Index r = 0; r < a.rows(); ++r) {
    Index i = a.row_offsets()[r], ie = a.row_offsets()[r + 1];
    Index j = b.row_offsets()[r], je = b.row_offsets()[r + 1];
    while (i < ie || j < je) {
      const Index ca = i < ie ? a.col_indices()[i] : a.cols();
      const Index cb = j < je ? b.col_indices()[j] : b.cols();
      if (ca == cb) {
        t.push_back({r, ca, a.values()[i++] + c * b.values()[j++]});
      } else if (ca < cb) {
        t.push_back({r, ca, a.values()[i++]});
      } else {
        t.push_back({r, cb, c * b.values()[j++]});
      }
    }
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

SparseMatrix scaled(const SparseMatrix& a, double c) { return add_scaled(SparseMatrix(a.rows(), a.cols()), a, c); }

SparseMatrix block_assemble(const BlockSystem& s) {
  const Index n = s.bulk_bulk.rows(), m = s.surface_surface.rows();
  if (s.bulk_bulk.cols() != n || s.surface_surface.cols() != m || s.bulk_surface.rows() != n ||
      s.bulk_surface.cols() != m || s.surface_bulk.rows() != m || s.surface_bulk.cols() != n)
    throw ShapeError("block_assemble: blocks " + shape(s.bulk_bulk) + ", " + shape(s.bulk_surface) + ", " +
                     shape(s.surface_bulk) + ", " + shape(s.surface_surface) + " are inconsistent");
  std::vector<Triplet> t;
  t.reserve(s.bulk_bulk.nnz() + s.bulk_surface.nnz() + s.surface_bulk.nnz() + s.surface_surface.nnz());
  auto put = [&](const SparseMatrix& b, Index r0, Index c0) {
    for (Index r = 0; r < b.rows(); ++r)
      for (Index k = b.row_offsets()[r]; k < b.row_offsets()[r + 1]; ++k)
        t.push_back({r0 + r, c0 + b.col_indices()[k], b.values()[k]});
  };
  put(s.bulk_bulk, 0, 0);
  put(s.bulk_surface, 0, n);
  put(s.surface_bulk, n, 0);
  put(s.surface_surface, n, n);
  return SparseMatrix::from_triplets(n + m, n + m, std::move(t));
}

Vector block_rhs(const BlockSystem& s) {
  if (s.rhs_bulk.size() != s.bulk_bulk.rows() || s.rhs_surface.size() != s.surface_surface.rows())
    throw ShapeError("block_rhs: right-hand side lengths do not match the blocks");
  Vector b(s.rhs_bulk.size() + s.rhs_surface.size());
  b << s.rhs_bulk, s.rhs_surface;
  return b;
}

void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << " " << a.cols() << " " << a.nnz() << "\n";
  char buf[64];
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = a.row_offsets()[r]; k < a.row_offsets()[r + 1]; ++k) {
      const auto res = std::to_chars(buf, buf + sizeof buf, a.values()[k]);
      out << r + 1 << " " << a.col_indices()[k] + 1 << " " << std::string_view(buf, res.ptr - buf) << "\n";
    }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  bool symmetric = false;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real", 0) != 0)
    throw ParseError("expected a real coordinate MatrixMarket header", 1);
  ++lineno;
  symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] != '%') break;
  }
  long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> rows >> cols >> nnz)) throw ParseError("expected '<rows> <cols> <nnz>'", lineno);
  }
  std::vector<Triplet> t;
  for (long k = 0; k < nnz; ++k) {
    if (!std::getline(in, line)) throw ParseError("unexpected end of file", lineno + 1);
    ++lineno;
    std::istringstream ls(line);
    long i = 0, j = 0;
    double v = 0;
    if (!(ls >> i >> j >> v) || i < 1 || j < 1 || i > rows || j > cols)
      throw ParseError("malformed entry '" + line + "'", lineno);
    t.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
    if (symmetric && i != j) t.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), v});
  }
  return SparseMatrix::from_triplets(static_cast<Index>(rows), static_cast<Index>(cols), std::move(t));
}

void write_vector(const Vector& v, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  char buf[64];
  for (Index i = 0; i < v.size(); ++i) {
    const auto res = std::to_chars(buf, buf + sizeof buf, v[i]);
    out << std::string_view(buf, res.ptr - buf) << "\n";
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace bsvem::linalg
