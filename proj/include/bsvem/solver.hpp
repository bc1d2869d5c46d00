#pragma once

#include "bsvem/sparse.hpp"

#include <Eigen/SparseLU>

#include <memory>

namespace bsvem::linalg {

enum class Method { Auto, DirectLU, Gmres };

struct SolveOptions {
  double tol = 1e-10;
  Method method = Method::Auto;
  Index direct_limit = 200000;  // Auto uses LU up to this many unknowns
  int max_iterations = 2000;
  int restart = 50;
  double ilu_drop_tol = 1e-6;
  int ilu_fill = 20;
};

// Sparse LU with COLAMD ordering, factored once and applied many times.
class Factorization {
 public:
  explicit Factorization(const SparseMatrix& a);

  Vector solve(const Vector& b) const;
  Index size() const { return n_; }
  bool symmetric() const { return symmetric_; }

 private:
  Index n_ = 0;
  bool symmetric_ = false;
  Eigen::SparseMatrix<double> a_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
};

struct SolveReport {
  Method method = Method::DirectLU;
  double relative_residual = 0.0;
  int iterations = 0;
};

Vector solve(const SparseMatrix& a, const Vector& b, const SolveOptions& opts = {}, SolveReport* report = nullptr);

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b);

struct ConditionEstimate {
  double condition = 0.0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double residual_max = 0.0;  // |A^T A v - s^2 v| / s^2 at the final iterate
  double residual_min = 0.0;
};

// 2-norm condition number: power iteration on A^T A for sigma_max and inverse
// iteration with LU factors of A and A^T for sigma_min.
ConditionEstimate condition_estimate(const SparseMatrix& a, int iters = 200);

}  // namespace bsvem::linalg
