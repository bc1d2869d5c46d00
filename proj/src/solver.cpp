#include "bsvem/solver.hpp"

#include "bsvem/error.hpp"

#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <string>

namespace bsvem::linalg {

namespace {

Vector start_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(1.0 + 3.7 * i);
  return v.normalized();
}

}  // namespace

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
  const double nb = b.norm();
  const double r = (spmv(a, x) - b).norm();
  return nb > 0.0 ? r / nb : r;
}

Factorization::Factorization(const SparseMatrix& a) : n_(a.rows()) {
  if (a.rows() != a.cols()) throw ShapeError("factorization of a non-square matrix");
  symmetric_ = a.is_symmetric();
  a_ = a.to_eigen();
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
  lu_->analyzePattern(a_);
  lu_->factorize(a_);
  if (lu_->info() != Eigen::Success) throw SingularSystem("sparse LU failed: " + lu_->lastErrorMessage());
  // SparseLU only reports exact zero pivots; also reject a vanishing geometric-mean pivot.
  const double scale = a_.cwiseAbs().sum() / std::max<Index>(n_, 1);
  const double logdet = lu_->logAbsDeterminant();
  if (!std::isfinite(logdet) || logdet < n_ * std::log(scale * 1e-14))
    throw SingularSystem("sparse LU: matrix is numerically singular");
}

Vector Factorization::solve(const Vector& b) const {
  if (b.size() != n_) throw ShapeError("factorization of size " + std::to_string(n_) + " applied to length " +
                                       std::to_string(b.size()));
  Vector x = lu_->solve(b);
  if (lu_->info() != Eigen::Success || !x.allFinite()) throw SingularSystem("sparse LU solve failed");
  return x;
}

Vector solve(const SparseMatrix& a, const Vector& b, const SolveOptions& opts, SolveReport* report) {
  if (a.rows() != a.cols() || b.size() != a.rows())
    throw ShapeError("solve: matrix " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " with right-hand side of length " + std::to_string(b.size()));
  Method m = opts.method;
  if (m == Method::Auto) m = a.rows() <= opts.direct_limit ? Method::DirectLU : Method::Gmres;
  SolveReport rep;
  rep.method = m;
  Vector x;
  if (m == Method::DirectLU) {
    const Factorization f(a);
    x = f.solve(b);
    rep.relative_residual = relative_residual(a, x, b);
    // Iterative refinement for the occasional ill-conditioned block system.
    for (int k = 0; k < 3 && rep.relative_residual > opts.tol; ++k) {
      x += f.solve(b - spmv(a, x));
      rep.relative_residual = relative_residual(a, x, b);
    }
  } else {
    const Eigen::SparseMatrix<double> ea = a.to_eigen();
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> gmres;
    gmres.preconditioner().setDroptol(opts.ilu_drop_tol);
    gmres.preconditioner().setFillfactor(opts.ilu_fill);
    gmres.set_restart(opts.restart);
    gmres.setMaxIterations(opts.max_iterations);
    gmres.setTolerance(opts.tol);
    gmres.compute(ea);
    if (gmres.info() != Eigen::Success) throw SingularSystem("incomplete LU preconditioner failed");
    x = gmres.solve(b);
    rep.iterations = static_cast<int>(gmres.iterations());
    rep.relative_residual = relative_residual(a, x, b);
  }
  if (report) *report = rep;
  if (!(rep.relative_residual <= opts.tol))
    throw ConvergenceError("solve: relative residual " + std::to_string(rep.relative_residual) +
                               " above tolerance " + std::to_string(opts.tol),
                           rep.relative_residual);
  return x;
}

ConditionEstimate condition_estimate(const SparseMatrix& a, int iters) {
  if (a.rows() != a.cols()) throw ShapeError("condition_estimate: matrix is not square");
  const Index n = a.rows();
  const SparseMatrix at = a.transpose();
  ConditionEstimate c;

  Vector v = start_vector(n);
  double lam = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector w = spmv(at, spmv(a, v));
    lam = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
  }
  {
    const Vector w = spmv(at, spmv(a, v));
    lam = v.dot(w);
    c.residual_max = lam > 0.0 ? (w - lam * v).norm() / lam : 0.0;
  }
  c.sigma_max = std::sqrt(std::max(lam, 0.0));

  const Factorization fa(a);
  const Factorization fat(at);
  auto apply_inv = [&](const Vector& x) { return fa.solve(fat.solve(x)); };  // (A^T A)^{-1}
  v = start_vector(n);
  double mu = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector w = apply_inv(v);
    mu = v.dot(w);
    v = w / w.norm();
  }
  {
    const Vector w = apply_inv(v);
    mu = v.dot(w);
    c.residual_min = mu > 0.0 ? (w - mu * v).norm() / mu : 0.0;
  }
  c.sigma_min = 1.0 / std::sqrt(mu);
  c.condition = c.sigma_max / c.sigma_min;
  return c;
}

}  // namespace bsvem::linalg
