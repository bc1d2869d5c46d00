#pragma once

#include "bsvem/geometry.hpp"
#include "bsvem/mesh.hpp"
#include "bsvem/solver.hpp"
#include "bsvem/vem.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <string_view>

namespace bsvem::solvers {

using geometry::AnalyticField;

struct EllipticProblem {
  double alpha = 1.0;
  double beta = 1.0;
  AnalyticField f;
  AnalyticField g;
};

struct DiscreteSolution {
  Vector bulk;     // xi, length N
  Vector surface;  // eta, length M
  double time = 0.0;
};

// [A + M + alpha R M_G R^T, -beta R M_G; -alpha M_G R^T, A_G + (beta + 1) M_G].
linalg::BlockSystem elliptic_block_system(const mesh::BulkSurfaceMesh& mesh, const vem::GlobalOperators& ops,
                                          const EllipticProblem& prob);

DiscreteSolution solve_elliptic(const mesh::BulkSurfaceMesh& mesh, const vem::GlobalOperators& ops,
                                const EllipticProblem& prob, const linalg::SolveOptions& opts = {});

enum class KineticsVariant { Plain, Projected };

KineticsVariant parse_kinetics_variant(std::string_view s);
std::string_view to_string(KineticsVariant v);

// Bulk reaction q(u), surface reaction r(u, v) and boundary flux s(u, v),
// where u is the bulk trace and v the surface value.
struct Kinetics {
  std::function<double(double)> q = [](double) { return 0.0; };
  std::function<double(double, double)> r = [](double, double) { return 0.0; };
  std::function<double(double, double)> s = [](double, double) { return 0.0; };
};

struct ParabolicProblem {
  double du = 1.0;
  double dv = 1.0;
  Kinetics kinetics;
  AnalyticField u0;
  AnalyticField v0;
  double T = 1.0;
  double tau = 1e-3;
  KineticsVariant variant = KineticsVariant::Plain;
};

Index step_count(double T, double tau);

// IMEX Euler: diffusion implicit, kinetics and coupling explicit. Both system
// matrices are factored once at construction.
class ImexStepper {
 public:
  ImexStepper(const mesh::BulkSurfaceMesh& mesh, const vem::GlobalOperators& ops, const ParabolicProblem& prob,
              const vem::VemOptions& vem_opts = {});

  DiscreteSolution step(const DiscreteSolution& state) const;
  DiscreteSolution initial_state() const;

  bool bulk_system_symmetric() const { return bulk_factor_->symmetric(); }
  bool surface_system_symmetric() const { return surface_factor_->symmetric(); }

 private:
  Vector bulk_reaction(const Vector& xi) const;

  const mesh::BulkSurfaceMesh& mesh_;
  const vem::GlobalOperators& ops_;
  ParabolicProblem prob_;
  std::unique_ptr<linalg::Factorization> bulk_factor_;
  std::unique_ptr<linalg::Factorization> surface_factor_;
  struct ProjectedElement {
    std::vector<Index> nodes;
    DenseMatrix pi_nabla;
    DenseMatrix pi_nabla_star;
    Eigen::Matrix3d monomial_mass;
  };
  std::vector<ProjectedElement> projected_;
};

using Observer = std::function<void(Index step, const DiscreteSolution& state)>;

// Runs ceil(T / tau) steps from the nodal interpolants of u0, v0. Observers see
// step 0 and every later step. Returns the final state.
DiscreteSolution solve_parabolic(const mesh::BulkSurfaceMesh& mesh, const vem::GlobalOperators& ops,
                                 const ParabolicProblem& prob, const std::vector<Observer>& observers = {},
                                 const vem::VemOptions& vem_opts = {});

double wave_pinning_kinetic(double a, double b, double k0, double gamma);
ParabolicProblem wave_pinning_problem(double eps2 = 1e-3, double k0 = 0.05, double gamma = 0.79);

// du = 1, dv = 1/4, q = -u, r = 2u, s = 4v/3 with exact u = e^-t xy, v = 1.5 e^-t xy.
ParabolicProblem parabolic_xy_problem(double tau, double T = 1.0);

double discrete_mass(const DiscreteSolution& state, const vem::GlobalOperators& ops);

struct SummaryRow {
  double t = 0.0;
  double mass = 0.0;
  double bulk_min = 0.0;
  double bulk_max = 0.0;
  double surf_min = 0.0;
  double surf_max = 0.0;
};

class MassRecorder {
 public:
  explicit MassRecorder(const vem::GlobalOperators& ops) : ops_(ops) {}
  void operator()(Index step, const DiscreteSolution& state);
  Observer observer() {
    return [this](Index step, const DiscreteSolution& state) { (*this)(step, state); };
  }
  const std::vector<SummaryRow>& rows() const { return rows_; }
  double max_relative_drift() const;
  void write_csv(const std::filesystem::path& path) const;

 private:
  const vem::GlobalOperators& ops_;
  std::vector<SummaryRow> rows_;
};

void write_snapshot(const mesh::BulkSurfaceMesh& mesh, const Vector& values, bool surface,
                    const std::filesystem::path& path);

}  // namespace bsvem::solvers
