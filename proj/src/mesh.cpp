#include "bsvem/mesh.hpp"

#include "bsvem/error.hpp"
#include "bsvem/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

namespace bsvem::mesh {

namespace {

std::uint64_t edge_key(Index a, Index b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

Polygon BulkSurfaceMesh::polygon(Index e) const {
  Polygon p;
  p.reserve(elements[e].size());
  for (Index v : elements[e]) p.push_back(nodes[v]);
  return p;
}

Vector ReductionMap::restrict_to_boundary(const Vector& bulk) const {
  if (bulk.size() != node_count) throw ShapeError("restrict_to_boundary: expected a bulk vector");
  return bulk.head(boundary_count);
}

Vector ReductionMap::extend_by_zero(const Vector& surface) const {
  if (surface.size() != boundary_count) throw ShapeError("extend_by_zero: expected a surface vector");
  Vector out = Vector::Zero(node_count);
  out.head(boundary_count) = surface;
  return out;
}

BulkSurfaceMesh build_mesh(std::vector<Point> nodes, std::vector<std::vector<Index>> elements) {
  const Index n = static_cast<Index>(nodes.size());
  std::unordered_set<std::uint64_t> directed;
  for (const auto& el : elements) {
    if (el.size() < 3) throw MeshGenerationError("element with fewer than 3 vertices");
    for (std::size_t k = 0; k < el.size(); ++k) {
      const Index a = el[k], b = el[(k + 1) % el.size()];
      if (a < 0 || a >= n) throw MeshGenerationError("element references a missing node");
      if (a == b) throw MeshGenerationError("element with a repeated consecutive vertex");
      if (!directed.insert(edge_key(a, b)).second)
        throw MeshGenerationError("edge " + std::to_string(a) + "->" + std::to_string(b) +
                                  " is shared by two elements with the same orientation");
    }
  }

  std::unordered_map<Index, Index> next;
  for (const auto& el : elements)
    for (std::size_t k = 0; k < el.size(); ++k) {
      const Index a = el[k], b = el[(k + 1) % el.size()];
      if (directed.count(edge_key(b, a))) continue;
      if (!next.emplace(a, b).second)
        throw MeshGenerationError("boundary is pinched at node " + std::to_string(a));
    }
  if (next.size() < 3) throw MeshGenerationError("mesh has no closed boundary");

  Index start = n;
  for (const auto& [a, b] : next) start = std::min(start, a);
  std::vector<Index> cycle;
  Index cur = start;
  do {
    cycle.push_back(cur);
    auto it = next.find(cur);
    if (it == next.end()) throw MeshGenerationError("boundary is not closed at node " + std::to_string(cur));
    cur = it->second;
  } while (cur != start && cycle.size() <= next.size());
  if (cur != start || cycle.size() != next.size())
    throw MeshGenerationError("boundary is not a single closed cycle");

  std::vector<Index> remap(n, -1);
  std::vector<char> used(n, 0);
  for (const auto& el : elements)
    for (Index v : el) used[v] = 1;
  Index next_id = 0;
  for (Index v : cycle) remap[v] = next_id++;
  for (Index v = 0; v < n; ++v)
    if (used[v] && remap[v] < 0) remap[v] = next_id++;

  BulkSurfaceMesh m;
  m.nodes.resize(next_id);
  for (Index v = 0; v < n; ++v)
    if (remap[v] >= 0) m.nodes[remap[v]] = nodes[v];
  m.num_boundary_nodes = static_cast<Index>(cycle.size());
  m.elements.reserve(elements.size());
  for (auto& el : elements) {
    for (Index& v : el) v = remap[v];
    m.elements.push_back(std::move(el));
  }
  const Index nb = m.num_boundary_nodes;
  for (Index k = 0; k < nb; ++k) m.boundary_edges.push_back({k, (k + 1) % nb});
  for (Index e = 0; e < m.num_elements(); ++e) {
    const auto& el = m.elements[e];
    m.meshsize = std::max(m.meshsize, geometry::diameter(m.polygon(e)));
    for (std::size_t k = 0; k < el.size(); ++k) {
      const Index a = el[k], b = el[(k + 1) % el.size()];
      if (a < nb && b == (a + 1) % nb) {
        m.narrow_band_elements.push_back(e);
        break;
      }
    }
  }
  return m;
}

Index count_boundary_touching_elements(const BulkSurfaceMesh& mesh) {
  Index c = 0;
  for (const auto& el : mesh.elements)
    c += std::any_of(el.begin(), el.end(), [&](Index v) { return v < mesh.num_boundary_nodes; }) ? 1 : 0;
  return c;
}

Index count_edges(const BulkSurfaceMesh& mesh) {
  std::unordered_set<std::uint64_t> edges;
  for (const auto& el : mesh.elements)
    for (std::size_t k = 0; k < el.size(); ++k) {
      const Index a = el[k], b = el[(k + 1) % el.size()];
      edges.insert(edge_key(std::min(a, b), std::max(a, b)));
    }
  return static_cast<Index>(edges.size());
}

double total_area(const BulkSurfaceMesh& mesh) {
  double a = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) a += geometry::signed_area(mesh.polygon(e));
  return a;
}

BulkSurfaceMesh structured_disc_triangulation(int rings) {
  if (rings < 1) throw InvalidArgument("structured_disc_triangulation: rings must be >= 1");
  std::vector<Point> nodes{Point::Zero()};
  std::vector<Index> start{0};
  for (int k = 1; k <= rings; ++k) {
    start.push_back(static_cast<Index>(nodes.size()));
    const int cnt = 6 * k;
    for (int j = 0; j < cnt; ++j) {
      const double th = 2.0 * std::numbers::pi * j / cnt;
      const double r = static_cast<double>(k) / rings;
      nodes.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  }
  std::vector<std::vector<Index>> els;
  for (int k = 1; k <= rings; ++k) {
    const int no = 6 * k;
    auto outer = [&](int j) { return start[k] + j % no; };
    if (k == 1) {
      for (int j = 0; j < no; ++j) els.push_back({0, outer(j), outer(j + 1)});
      continue;
    }
    const int ni = 6 * (k - 1);
    auto inner = [&](int i) { return start[k - 1] + i % ni; };
    // Merge the two rings by angle; i and j count steps taken on each ring.
    int i = 0, j = 0;
    while (i < ni || j < no) {
      const bool take_outer = i >= ni || (j < no && (j + 1) * ni <= (i + 1) * no);
      if (take_outer) {
        els.push_back({inner(i), outer(j), outer(j + 1)});
        ++j;
      } else {
        els.push_back({inner(i), outer(j), inner(i + 1)});
        ++i;
      }
    }
  }
  return build_mesh(std::move(nodes), std::move(els));
}

}  // namespace bsvem::mesh
