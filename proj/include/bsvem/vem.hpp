#pragma once

#include "bsvem/geometry.hpp"
#include "bsvem/mesh.hpp"
#include "bsvem/sparse.hpp"
#include "bsvem/types.hpp"

#include <string_view>

namespace bsvem::vem {

enum class StabScaling { Paper, Classic };
enum class PiNablaZeroMode { Edge, Vertex };

StabScaling parse_stab_scaling(std::string_view s);
PiNablaZeroMode parse_pinabla_zero_mode(std::string_view s);
std::string_view to_string(StabScaling s);
std::string_view to_string(PiNablaZeroMode m);

struct VemOptions {
  StabScaling stab_scaling = StabScaling::Paper;
  PiNablaZeroMode pinabla_zero_mode = PiNablaZeroMode::Edge;
};

struct LocalElementData {
  Polygon polygon;
  double h_E = 0.0;
  Point centroid = Point::Zero();
  double area = 0.0;
  DenseMatrix D;            // n x 3
  DenseMatrix B;            // 3 x n
  Eigen::Matrix3d G;        // B D
  double g_condition = 0.0;
  DenseMatrix pi_nabla_star;  // 3 x n
  DenseMatrix pi_nabla;       // n x n
};

// Projector data for a counterclockwise polygon. Monomials are
// {1, (x - x_E)/h_E, (y - y_E)/h_E}.
LocalElementData local_projector(const Polygon& polygon, const VemOptions& opts = {}, Index element_id = -1);

// Integrals of products of the three scaled monomials over the element.
Eigen::Matrix3d monomial_mass(const LocalElementData& data);

DenseMatrix local_stiffness(const LocalElementData& data, const VemOptions& opts = {});
DenseMatrix local_mass(const LocalElementData& data, const VemOptions& opts = {});

struct EdgeMatrices {
  Eigen::Matrix2d stiffness;
  Eigen::Matrix2d mass;
};

EdgeMatrices surface_edge_matrices(double edge_length);

struct AssemblyStats {
  Index computed = 0;  // local matrices built from scratch
  Index reused = 0;    // local matrices taken from the congruence cache
};

struct GlobalOperators {
  linalg::SparseMatrix bulk_stiffness;   // A_Omega
  linalg::SparseMatrix bulk_mass;        // M_Omega
  linalg::SparseMatrix surface_stiffness;  // A_Gamma
  linalg::SparseMatrix surface_mass;       // M_Gamma
  AssemblyStats stats;
};

struct AssemblyOptions {
  VemOptions vem;
  // 0 means the BSVEM_THREADS environment variable, or 1 when unset.
  int threads = 0;
  // Reuse local matrices of elements that are translates of an earlier one.
  bool reuse_translates = true;
};

int resolve_thread_count(int requested);

GlobalOperators assemble(const mesh::BulkSurfaceMesh& mesh, const AssemblyOptions& opts = {});

Vector interpolate_bulk(const geometry::AnalyticField& field, const mesh::BulkSurfaceMesh& mesh, double time = 0.0);
Vector interpolate_surface(const geometry::AnalyticField& field, const mesh::BulkSurfaceMesh& mesh, double time = 0.0);

}  // namespace bsvem::vem
