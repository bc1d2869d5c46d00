#pragma once

#include "bsvem/geometry.hpp"
#include "bsvem/mesh.hpp"
#include "bsvem/solvers.hpp"
#include "bsvem/sparse.hpp"
#include "bsvem/vem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bsvem::analysis {

using geometry::AnalyticField;

// Pi0 U at the points of a centroid-fan 3-point rule, as a sparse operator on
// the nodal vector. Built once per mesh and reused for every time level.
class BulkErrorEvaluator {
 public:
  BulkErrorEvaluator(const mesh::BulkSurfaceMesh& mesh, const vem::VemOptions& opts = {});
  double l2(const Vector& xi, const AnalyticField& exact, double time = 0.0) const;
  Index num_points() const { return static_cast<Index>(points_.size()); }

 private:
  std::vector<Point> points_;
  std::vector<double> weights_;
  linalg::SparseMatrix projection_;
};

// Two-point Gauss rule per boundary edge; the exact field is evaluated at the
// closest point on Gamma of each quadrature point.
class SurfaceErrorEvaluator {
 public:
  SurfaceErrorEvaluator(const mesh::BulkSurfaceMesh& mesh, const geometry::DomainDescriptor& domain);
  double l2(const Vector& eta, const AnalyticField& exact, double time = 0.0) const;

 private:
  std::vector<Point> points_;
  std::vector<double> weights_;
  linalg::SparseMatrix interpolation_;
};

double l2_error_bulk(const Vector& xi, const mesh::BulkSurfaceMesh& mesh, const AnalyticField& exact,
                     double time = 0.0, const vem::VemOptions& opts = {});
double l2_error_surface(const Vector& eta, const mesh::BulkSurfaceMesh& mesh, const AnalyticField& exact,
                        double time = 0.0, const geometry::DomainDescriptor& domain = geometry::unit_disc());

enum class Where { Bulk, Surface };

double linf_error(const Vector& v, const mesh::BulkSurfaceMesh& mesh, const AnalyticField& exact, double time,
                  Where where);

// sqrt(d^T M d) with d the nodal error.
double mass_norm_error(const Vector& v, const linalg::SparseMatrix& mass, const Vector& exact_nodal);

// log(e_{i-1}/e_i) / log(h_{i-1}/h_i); entries with a nonpositive or
// non-finite error are empty.
std::vector<std::optional<double>> eoc(const std::vector<double>& errors, const std::vector<double>& hs);

enum class ErrorNorm { Quadrature, NodalMass };
enum class MeshFamily { CartesianCut, StructuredTriangles };

ErrorNorm parse_error_norm(std::string_view s);
MeshFamily parse_mesh_family(std::string_view s);
std::string_view to_string(ErrorNorm n);
std::string_view to_string(MeshFamily f);

struct ErrorRecord {
  double h = 0.0;
  std::optional<double> tau;
  double l2_bulk = 0.0;
  double l2_surface = 0.0;
  double linf_bulk = 0.0;
  double linf_surface = 0.0;
  double l2 = 0.0;    // sqrt(bulk^2 + surface^2); max over time levels for parabolic runs
  double linf = 0.0;  // max(bulk, surface); max over time levels for parabolic runs
  std::optional<double> cond;
  Index n_nodes = 0;
  Index n_boundary_nodes = 0;
  Index n_elements = 0;
  Index n_narrow_band = 0;
  Index n_touching = 0;
  Index computed_local = 0;
  std::string failure;  // empty when the level succeeded
  double seconds = 0.0;
};

struct ConvergenceTable {
  std::string experiment;
  std::vector<ErrorRecord> rows;
  std::vector<std::optional<double>> l2_eoc;    // size rows; first entry empty
  std::vector<std::optional<double>> linf_eoc;

  std::string to_csv() const;
  std::string to_text() const;
};

struct StudyConfig {
  std::string experiment = "elliptic-xy";
  MeshFamily family = MeshFamily::CartesianCut;
  int levels = 5;
  double base_spacing = 0.5;  // grid spacing of level 0, halved per level
  double eps = 0.1;
  double alpha = 1.0;
  double beta = 2.0;
  double tau0 = 1e-3;  // tau_i = tau0 * 4^-i
  double T = 1.0;
  vem::VemOptions vem;
  solvers::KineticsVariant variant = solvers::KineticsVariant::Plain;
  ErrorNorm norm = ErrorNorm::Quadrature;
  bool condition = true;
  int threads = 0;
};

int family_rings(int level);
mesh::BulkSurfaceMesh family_mesh(const StudyConfig& cfg, int level);

// Runs every level; a failing level is recorded and the study continues.
ConvergenceTable run_convergence_study(const StudyConfig& cfg);

}  // namespace bsvem::analysis
