#include "bsvem/vem.hpp"

#include "bsvem/error.hpp"
#include "bsvem/polygon.hpp"

#include <cmath>
#include <string>

namespace bsvem::vem {

StabScaling parse_stab_scaling(std::string_view s) {
  if (s == "paper") return StabScaling::Paper;
  if (s == "classic") return StabScaling::Classic;
  throw InvalidArgument("stab_scaling must be 'paper' or 'classic', got '" + std::string(s) + "'");
}

PiNablaZeroMode parse_pinabla_zero_mode(std::string_view s) {
  if (s == "edge") return PiNablaZeroMode::Edge;
  if (s == "vertex") return PiNablaZeroMode::Vertex;
  throw InvalidArgument("pinabla_zero_mode must be 'edge' or 'vertex', got '" + std::string(s) + "'");
}

std::string_view to_string(StabScaling s) { return s == StabScaling::Paper ? "paper" : "classic"; }
std::string_view to_string(PiNablaZeroMode m) { return m == PiNablaZeroMode::Edge ? "edge" : "vertex"; }

LocalElementData local_projector(const Polygon& polygon, const VemOptions& opts, Index element_id) {
  const Index n = static_cast<Index>(polygon.size());
  auto degenerate = [&](const std::string& why) {
    return DegenerateElement("element " + std::to_string(element_id) + ": " + why, {element_id});
  };
  if (n < 3) throw degenerate("fewer than 3 vertices");
  LocalElementData d;
  d.polygon = polygon;
  d.area = geometry::signed_area(polygon);
  if (!(d.area > 0.0)) throw degenerate("nonpositive area");
  d.h_E = geometry::diameter(polygon);
  d.centroid = geometry::centroid(polygon);

  d.D.resize(n, 3);
  for (Index i = 0; i < n; ++i) {
    d.D(i, 0) = 1.0;
    d.D.row(i).tail<2>() = ((polygon[i] - d.centroid) / d.h_E).transpose();
  }

  // Edge i runs from vertex i to i+1; its outward normal times length is
  // (dy, -dx). Trapezoid weights put half of each adjacent edge on a vertex.
  d.B.resize(3, n);
  const double per = geometry::perimeter(polygon);
  for (Index i = 0; i < n; ++i) {
    const Point& prev = polygon[(i + n - 1) % n];
    const Point& cur = polygon[i];
    const Point& next = polygon[(i + 1) % n];
    const Point e0 = cur - prev, e1 = next - cur;
    const Point nl = Point(e0.y(), -e0.x()) + Point(e1.y(), -e1.x());
    d.B.block<2, 1>(1, i) = 0.5 * nl / d.h_E;
    d.B(0, i) = opts.pinabla_zero_mode == PiNablaZeroMode::Edge ? 0.5 * (e0.norm() + e1.norm()) / per
                                                                : 1.0 / static_cast<double>(n);
  }
  d.G = d.B * d.D;
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(d.G);
  const auto sv = svd.singularValues();
  d.g_condition = sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
  if (!(d.g_condition < 1e13)) throw degenerate("projector matrix G is singular");
  d.pi_nabla_star = d.G.partialPivLu().solve(d.B);
  d.pi_nabla = d.D * d.pi_nabla_star;
  return d;
}

Eigen::Matrix3d monomial_mass(const LocalElementData& d) {
  // Centroid fan, 3-point rule (exact for quadratics) on each sub-triangle.
  static constexpr double bary[3][3] = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  const std::size_t n = d.polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = d.polygon[i];
    const Point& b = d.polygon[(i + 1) % n];
    const double area = 0.5 * cross(a - d.centroid, b - d.centroid);
    for (const auto& w : bary) {
      const Point x = w[0] * d.centroid + w[1] * a + w[2] * b;
      const Eigen::Vector3d m(1.0, (x.x() - d.centroid.x()) / d.h_E, (x.y() - d.centroid.y()) / d.h_E);
      h += (area / 3.0) * m * m.transpose();
    }
  }
  return h;
}

DenseMatrix local_stiffness(const LocalElementData& d, const VemOptions& opts) {
  const Index n = static_cast<Index>(d.polygon.size());
  Eigen::Matrix3d gt = d.G;
  gt.row(0).setZero();
  const DenseMatrix rem = DenseMatrix::Identity(n, n) - d.pi_nabla;
  const double s = opts.stab_scaling == StabScaling::Paper ? d.h_E : 1.0;
  DenseMatrix k = d.pi_nabla_star.transpose() * gt * d.pi_nabla_star + s * rem.transpose() * rem;
  return 0.5 * (k + k.transpose());
}

DenseMatrix local_mass(const LocalElementData& d, const VemOptions&) {
  const Index n = static_cast<Index>(d.polygon.size());
  const DenseMatrix rem = DenseMatrix::Identity(n, n) - d.pi_nabla;
  DenseMatrix m = d.pi_nabla_star.transpose() * monomial_mass(d) * d.pi_nabla_star + d.area * rem.transpose() * rem;
  return 0.5 * (m + m.transpose());
}

EdgeMatrices surface_edge_matrices(double edge_length) {
  if (!(edge_length > 0.0)) throw DegenerateEdge("surface edge with nonpositive length " + std::to_string(edge_length));
  EdgeMatrices e;
  e.stiffness << 1.0, -1.0, -1.0, 1.0;
  e.stiffness /= edge_length;
  e.mass << 2.0, 1.0, 1.0, 2.0;
  e.mass *= edge_length / 6.0;
  return e;
}

Vector interpolate_bulk(const geometry::AnalyticField& field, const mesh::BulkSurfaceMesh& mesh, double time) {
  Vector v(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) v[i] = field(mesh.nodes[i], time);
  return v;
}

Vector interpolate_surface(const geometry::AnalyticField& field, const mesh::BulkSurfaceMesh& mesh, double time) {
  Vector v(mesh.num_boundary_nodes);
  for (Index i = 0; i < mesh.num_boundary_nodes; ++i) v[i] = field(mesh.nodes[i], time);
  return v;
}

}  // namespace bsvem::vem
