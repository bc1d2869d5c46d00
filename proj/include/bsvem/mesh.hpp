#pragma once

#include "bsvem/geometry.hpp"
#include "bsvem/types.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace bsvem::mesh {

using geometry::DomainDescriptor;

// Polygonal bulk mesh plus the boundary polyline it induces. Nodes
// [0, num_boundary_nodes) are the boundary nodes in cycle order, so the
// reduction matrix is index slicing.
struct BulkSurfaceMesh {
  std::vector<Point> nodes;
  Index num_boundary_nodes = 0;
  std::vector<std::vector<Index>> elements;
  std::vector<std::array<Index, 2>> boundary_edges;
  double meshsize = 0.0;
  std::vector<Index> narrow_band_elements;

  Index num_nodes() const { return static_cast<Index>(nodes.size()); }
  Index num_elements() const { return static_cast<Index>(elements.size()); }
  Polygon polygon(Index e) const;

  bool operator==(const BulkSurfaceMesh&) const = default;
};

struct ReductionMap {
  Index boundary_count = 0;
  Index node_count = 0;

  explicit ReductionMap(const BulkSurfaceMesh& m) : boundary_count(m.num_boundary_nodes), node_count(m.num_nodes()) {}
  ReductionMap(Index m, Index n) : boundary_count(m), node_count(n) {}

  Vector restrict_to_boundary(const Vector& bulk) const;  // R^T
  Vector extend_by_zero(const Vector& surface) const;     // R
};

// Orders nodes boundary-first, walks the boundary cycle starting from the
// lowest-indexed boundary node, drops unused nodes and fills the derived
// fields. Throws MeshGenerationError if the outer boundary is not one cycle.
BulkSurfaceMesh build_mesh(std::vector<Point> nodes, std::vector<std::vector<Index>> elements);

struct GenerationReport {
  Index cut_cells = 0;
  Index merged_nodes = 0;
  Index collapsed_elements = 0;
  Index skipped_collapses = 0;
  double kappa = 0.0;  // max |signed_distance| on boundary edges / h^2
};

// Background grid of spacing h anchored at the origin; cut cells keep their
// inside corners and project the others onto Gamma. Applies merge and
// collapse post-processing with the same eps.
BulkSurfaceMesh generate_cartesian_cut(const DomainDescriptor& domain, double h, double eps = 0.1,
                                       GenerationReport* report = nullptr);

// Merges nodes of a common element closer than eps * meshsize.
BulkSurfaceMesh merge_close_nodes(const BulkSurfaceMesh& mesh, double eps, Index* merged = nullptr);

// Removes elements with an interior angle below eps radians by reducing the
// angle to zero. Slivers on the boundary push their interior chain onto Gamma.
BulkSurfaceMesh collapse_small_angles(const BulkSurfaceMesh& mesh, const DomainDescriptor& domain, double eps,
                                      GenerationReport* report = nullptr);

// Concentric rings of 6k nodes at radius k/rings, triangulated ring to ring.
BulkSurfaceMesh structured_disc_triangulation(int rings);

// Elements with at least one node on Gamma (the count a boundary-only
// assembly has to recompute).
Index count_boundary_touching_elements(const BulkSurfaceMesh& mesh);

Index count_edges(const BulkSurfaceMesh& mesh);
double total_area(const BulkSurfaceMesh& mesh);

struct Violation {
  std::string check;  // F1, F2, F3, V1, V2 or "orientation"
  Index element = -1;
  Index other = -1;
  std::string detail;
};

struct MeshQualityReport {
  std::vector<double> star_ratio;    // kernel inscribed diameter / h_E
  std::vector<double> spread_ratio;  // min node distance / h_E
  double min_star_ratio = 0.0;
  double min_spread_ratio = 0.0;
  std::vector<Violation> violations;
  bool passed = false;
};

MeshQualityReport validate_mesh(const BulkSurfaceMesh& mesh, const DomainDescriptor& domain, double gamma1,
                                double gamma2);

void save_mesh(const BulkSurfaceMesh& mesh, const std::filesystem::path& path);
BulkSurfaceMesh load_mesh(const std::filesystem::path& path);

std::string to_string(const BulkSurfaceMesh& mesh);
BulkSurfaceMesh parse_mesh(const std::string& text);

}  // namespace bsvem::mesh
