#include "bsvem/mesh.hpp"
#include "bsvem/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace bsvem::mesh {

namespace {

struct Box {
  Point lo, hi;
};

Box bbox(const Polygon& p) {
  Box b{p[0], p[0]};
  for (const Point& x : p) {
    b.lo = b.lo.cwiseMin(x);
    b.hi = b.hi.cwiseMax(x);
  }
  return b;
}

bool overlap(const Box& a, const Box& b) {
  return a.lo.x() <= b.hi.x() && b.lo.x() <= a.hi.x() && a.lo.y() <= b.hi.y() && b.lo.y() <= a.hi.y();
}

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
  const Point d = b - a;
  const double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (x - (a + t * d)).norm();
}

// Describes why two elements meet illegally, or returns an empty string.
std::string classify_pair(const BulkSurfaceMesh& m, Index e1, Index e2) {
  const auto& a = m.elements[e1];
  const auto& b = m.elements[e2];
  const double tol = 1e-12 * m.meshsize;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Index a0 = a[i], a1 = a[(i + 1) % a.size()];
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Index b0 = b[j], b1 = b[(j + 1) % b.size()];
      if (a0 == b0 && a1 == b1) return "edge used twice with the same orientation";
      if (a0 == b1 && a1 == b0) continue;
      const Point &p0 = m.nodes[a0], &p1 = m.nodes[a1], &q0 = m.nodes[b0], &q1 = m.nodes[b1];
      if (!geometry::segments_intersect(p0, p1, q0, q1)) continue;
      const bool shared = a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1;
      if (!shared) return "edges cross or touch away from shared nodes";
      // Sharing one node: legal unless the segments also overlap elsewhere.
      const Index common = (a0 == b0 || a0 == b1) ? a0 : a1;
      const Index pa = common == a0 ? a1 : a0;
      const Index pb = (common == b0) ? b1 : b0;
      if (point_segment_distance(m.nodes[pa], q0, q1) <= tol || point_segment_distance(m.nodes[pb], p0, p1) <= tol)
        return "edges overlap along a segment";
    }
  }
  const Polygon pa = m.polygon(e1), pb = m.polygon(e2);
  for (Index v : b)
    if (std::find(a.begin(), a.end(), v) == a.end() && geometry::contains(pa, m.nodes[v]))
      return "vertex inside the other element";
  for (Index v : a)
    if (std::find(b.begin(), b.end(), v) == b.end() && geometry::contains(pb, m.nodes[v]))
      return "vertex inside the other element";
  return {};
}

}  // namespace

MeshQualityReport validate_mesh(const BulkSurfaceMesh& mesh, const DomainDescriptor& domain, double gamma1,
                                double gamma2) {
  MeshQualityReport r;
  const Index ne = mesh.num_elements();
  r.star_ratio.resize(ne);
  r.spread_ratio.resize(ne);
  std::vector<Box> boxes(ne);
  for (Index e = 0; e < ne; ++e) {
    const Polygon p = mesh.polygon(e);
    boxes[e] = bbox(p);
    const double hE = geometry::diameter(p);
    if (hE > mesh.meshsize * (1.0 + 1e-12))
      r.violations.push_back({"F1", e, -1, "diameter exceeds meshsize"});
    if (!(geometry::signed_area(p) > 0.0) || !geometry::is_simple(p))
      r.violations.push_back({"orientation", e, -1, "polygon is not simple and counterclockwise"});
    r.star_ratio[e] = hE > 0.0 ? 2.0 * std::max(0.0, geometry::kernel_ball(p).radius) / hE : 0.0;
    r.spread_ratio[e] = hE > 0.0 ? geometry::min_vertex_distance(p) / hE : 0.0;
    if (r.star_ratio[e] < gamma1) {
      std::ostringstream os;
      os << "star ratio " << r.star_ratio[e] << " < " << gamma1;
      r.violations.push_back({"V1", e, -1, os.str()});
    }
    if (r.spread_ratio[e] < gamma2) {
      std::ostringstream os;
      os << "node spread ratio " << r.spread_ratio[e] << " < " << gamma2;
      r.violations.push_back({"V2", e, -1, os.str()});
    }
  }
  r.min_star_ratio = ne ? *std::min_element(r.star_ratio.begin(), r.star_ratio.end()) : 0.0;
  r.min_spread_ratio = ne ? *std::min_element(r.spread_ratio.begin(), r.spread_ratio.end()) : 0.0;

  // Bucket elements on a grid of cell size h and test pairs sharing a bucket.
  if (ne > 0 && mesh.meshsize > 0.0) {
    const double cell = mesh.meshsize;
    std::map<std::pair<long, long>, std::vector<Index>> buckets;
    for (Index e = 0; e < ne; ++e) {
      const long x0 = static_cast<long>(std::floor(boxes[e].lo.x() / cell));
      const long x1 = static_cast<long>(std::floor(boxes[e].hi.x() / cell));
      const long y0 = static_cast<long>(std::floor(boxes[e].lo.y() / cell));
      const long y1 = static_cast<long>(std::floor(boxes[e].hi.y() / cell));
      for (long i = x0; i <= x1; ++i)
        for (long j = y0; j <= y1; ++j) buckets[{i, j}].push_back(e);
    }
    std::vector<std::pair<Index, Index>> checked;
    for (const auto& [key, list] : buckets)
      for (std::size_t i = 0; i < list.size(); ++i)
        for (std::size_t j = i + 1; j < list.size(); ++j)
          if (overlap(boxes[list[i]], boxes[list[j]])) checked.emplace_back(list[i], list[j]);
    std::sort(checked.begin(), checked.end());
    checked.erase(std::unique(checked.begin(), checked.end()), checked.end());
    for (const auto& [e1, e2] : checked) {
      const std::string why = classify_pair(mesh, e1, e2);
      if (!why.empty()) r.violations.push_back({"F2", e1, e2, why});
    }
  }

  for (Index v = 0; v < mesh.num_boundary_nodes; ++v) {
    const double d = std::abs(domain.signed_distance(mesh.nodes[v]));
    if (!(d <= 1e-10)) {
      std::ostringstream os;
      os << "boundary node " << v << " is " << d << " away from Gamma";
      r.violations.push_back({"F3", -1, v, os.str()});
    }
  }
  r.passed = r.violations.empty();
  return r;
}

}  // namespace bsvem::mesh
