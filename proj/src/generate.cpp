#include "bsvem/error.hpp"
#include "bsvem/mesh.hpp"
#include "bsvem/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace bsvem::mesh {

namespace {

std::uint64_t edge_key(Index a, Index b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

Polygon gather(const std::vector<Point>& nodes, const std::vector<Index>& el) {
  Polygon p;
  p.reserve(el.size());
  for (Index v : el) p.push_back(nodes[v]);
  return p;
}

bool valid_polygon(const std::vector<Point>& nodes, const std::vector<Index>& el) {
  if (el.size() < 3) return false;
  const Polygon p = gather(nodes, el);
  return geometry::signed_area(p) > 0.0 && geometry::is_simple(p);
}

// Splits a vertex loop at repeated vertices into simple loops.
void split_loops(std::vector<Index> loop, std::vector<std::vector<Index>>& out) {
  for (std::size_t i = 0; i < loop.size(); ++i)
    for (std::size_t j = i + 1; j < loop.size(); ++j)
      if (loop[i] == loop[j]) {
        std::vector<Index> inner(loop.begin() + i, loop.begin() + j);
        std::vector<Index> outer(loop.begin(), loop.begin() + i);
        outer.insert(outer.end(), loop.begin() + j, loop.end());
        split_loops(std::move(inner), out);
        split_loops(std::move(outer), out);
        return;
      }
  out.push_back(std::move(loop));
}

std::vector<Index> drop_consecutive_repeats(const std::vector<Index>& el) {
  std::vector<Index> out;
  for (Index v : el)
    if (out.empty() || out.back() != v) out.push_back(v);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

double boundary_kappa(const BulkSurfaceMesh& m, const DomainDescriptor& domain) {
  if (m.meshsize <= 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& [a, b] : m.boundary_edges)
    for (int k = 0; k <= 4; ++k) {
      const double t = k / 4.0;
      const Point x = (1.0 - t) * m.nodes[a] + t * m.nodes[b];
      worst = std::max(worst, std::abs(domain.signed_distance(x)));
    }
  return worst / (m.meshsize * m.meshsize);
}

}  // namespace

BulkSurfaceMesh merge_close_nodes(const BulkSurfaceMesh& mesh, double eps, Index* merged) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("merge_close_nodes: eps must lie in (0, 1/2)");
  const double thr = eps * mesh.meshsize;
  const Index nb = mesh.num_boundary_nodes;

  std::set<std::tuple<double, Index, Index>> pairs;
  for (const auto& el : mesh.elements)
    for (std::size_t i = 0; i < el.size(); ++i)
      for (std::size_t j = i + 1; j < el.size(); ++j) {
        const double d = (mesh.nodes[el[i]] - mesh.nodes[el[j]]).norm();
        if (d < thr) pairs.emplace(d, std::min(el[i], el[j]), std::max(el[i], el[j]));
      }
  if (merged) *merged = 0;
  if (pairs.empty()) return mesh;

  std::vector<Index> parent(mesh.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Index v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<Point> pos = mesh.nodes;
  std::vector<char> on_gamma(mesh.nodes.size(), 0);
  for (Index v = 0; v < nb; ++v) on_gamma[v] = 1;

  Index count = 0;
  for (const auto& [d, a0, b0] : pairs) {
    Index a = find(a0), b = find(b0);
    if (a == b || (pos[a] - pos[b]).norm() >= thr) continue;
    if (b < a) std::swap(a, b);
    Index keep = a;
    Point p;
    if (on_gamma[a] && !on_gamma[b]) {
      p = pos[a];
    } else if (on_gamma[b] && !on_gamma[a]) {
      keep = b;
      p = pos[b];
    } else if (on_gamma[a]) {
      p = pos[a];
    } else {
      p = 0.5 * (pos[a] + pos[b]);
    }
    const Index gone = keep == a ? b : a;
    parent[gone] = keep;
    pos[keep] = p;
    on_gamma[keep] = on_gamma[a] || on_gamma[b];
    ++count;
  }
  if (merged) *merged = count;

  std::vector<std::vector<Index>> elements;
  for (const auto& el : mesh.elements) {
    std::vector<Index> mapped;
    for (Index v : el) mapped.push_back(find(v));
    std::vector<std::vector<Index>> loops;
    split_loops(drop_consecutive_repeats(mapped), loops);
    for (auto& loop : loops) {
      loop = drop_consecutive_repeats(loop);
      if (loop.size() >= 3 && geometry::signed_area(gather(pos, loop)) > 0.0) elements.push_back(std::move(loop));
    }
  }
  return build_mesh(std::move(pos), std::move(elements));
}

namespace {

class Collapser {
 public:
  Collapser(const BulkSurfaceMesh& mesh, const DomainDescriptor& domain, double eps)
      : nodes_(mesh.nodes), elements_(mesh.elements), alive_(mesh.elements.size(), 1), domain_(domain), eps_(eps) {
    on_gamma_.assign(nodes_.size(), 0);
    for (Index v = 0; v < mesh.num_boundary_nodes; ++v) on_gamma_[v] = 1;
  }

  void run(GenerationReport* report) {
    std::vector<char> skipped(elements_.size(), 0);
    for (;;) {
      rebuild_adjacency();
      Index target = -1;
      for (Index e = 0; e < static_cast<Index>(elements_.size()); ++e) {
        if (!alive_[e] || skipped[e]) continue;
        const auto ang = geometry::interior_angles(gather(nodes_, elements_[e]));
        if (*std::min_element(ang.begin(), ang.end()) < eps_) {
          target = e;
          break;
        }
      }
      if (target < 0) break;
      if (collapse(target)) {
        if (report) ++report->collapsed_elements;
      } else {
        skipped[target] = 1;
        if (report) ++report->skipped_collapses;
      }
    }
  }

  BulkSurfaceMesh result() {
    std::vector<std::vector<Index>> els;
    for (std::size_t e = 0; e < elements_.size(); ++e)
      if (alive_[e]) els.push_back(elements_[e]);
    return build_mesh(nodes_, std::move(els));
  }

 private:
  void rebuild_adjacency() {
    owner_.clear();
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      if (!alive_[e]) continue;
      const auto& el = elements_[e];
      for (std::size_t k = 0; k < el.size(); ++k) owner_[edge_key(el[k], el[(k + 1) % el.size()])] = static_cast<Index>(e);
    }
    on_boundary_.assign(nodes_.size(), 0);
    for (const auto& [key, e] : owner_) {
      const Index a = static_cast<Index>(key >> 32), b = static_cast<Index>(key & 0xffffffffu);
      if (!owner_.count(edge_key(b, a))) on_boundary_[a] = on_boundary_[b] = 1;
    }
  }

  std::optional<Index> neighbour(Index a, Index b) const {
    auto it = owner_.find(edge_key(b, a));
    if (it == owner_.end()) return std::nullopt;
    return it->second;
  }

  Index incidence(Index v) const {
    Index c = 0;
    for (std::size_t e = 0; e < elements_.size(); ++e)
      if (alive_[e] && std::find(elements_[e].begin(), elements_[e].end(), v) != elements_[e].end()) ++c;
    return c;
  }

  bool collapse(Index e) {
    const std::vector<Index> el = elements_[e];
    const std::size_t n = el.size();
    const Polygon poly = gather(nodes_, el);
    const auto ang = geometry::interior_angles(poly);
    const std::size_t p = static_cast<std::size_t>(std::min_element(ang.begin(), ang.end()) - ang.begin());
    std::size_t q = (p + 1) % n;
    for (std::size_t k = 0; k < n; ++k)
      if (k != p && (poly[k] - poly[p]).norm() > (poly[q] - poly[p]).norm()) q = k;

    // chain_a runs p -> q, chain_b runs q -> p, both in element order.
    std::vector<Index> chain_a, chain_b;
    for (std::size_t k = p;; k = (k + 1) % n) {
      chain_a.push_back(el[k]);
      if (k == q) break;
    }
    for (std::size_t k = q;; k = (k + 1) % n) {
      chain_b.push_back(el[k]);
      if (k == p) break;
    }
    auto boundary_edges = [&](const std::vector<Index>& c) {
      std::size_t cnt = 0;
      for (std::size_t k = 0; k + 1 < c.size(); ++k) cnt += neighbour(c[k], c[k + 1]) ? 0 : 1;
      return cnt;
    };
    const std::size_t ba = boundary_edges(chain_a), bb = boundary_edges(chain_b);
    if (ba == 0 && bb == 0) return collapse_interior(e, chain_a, chain_b);
    if (ba == chain_a.size() - 1 && bb == 0) return collapse_boundary(e, chain_a, chain_b);
    if (bb == chain_b.size() - 1 && ba == 0) return collapse_boundary(e, chain_b, chain_a);
    return false;
  }

  // `keep` is made of boundary edges; the element disappears and `move` becomes boundary.
  bool collapse_boundary(Index e, const std::vector<Index>& keep, const std::vector<Index>& move) {
    for (std::size_t k = 1; k + 1 < keep.size(); ++k)
      if (incidence(keep[k]) != 1) return false;
    const auto saved_nodes = nodes_;
    const auto saved_gamma = on_gamma_;
    std::vector<Index> touched;
    for (std::size_t k = 1; k + 1 < move.size(); ++k) {
      const Index v = move[k];
      if (on_boundary_[v]) return false;
      if (on_gamma_[v]) continue;
      try {
        nodes_[v] = domain_.closest_point(nodes_[v]);
      } catch (const Error&) {
        nodes_ = saved_nodes;
        on_gamma_ = saved_gamma;
        return false;
      }
      on_gamma_[v] = 1;
      touched.push_back(v);
    }
    alive_[e] = 0;
    if (!neighbours_valid(touched)) {
      alive_[e] = 1;
      nodes_ = saved_nodes;
      on_gamma_ = saved_gamma;
      return false;
    }
    return true;
  }

  struct Projection {
    Point point;
    double s = 0.0;
    double distance = 0.0;
  };

  static Projection project_onto_polyline(const std::vector<Point>& line, const Point& x) {
    Projection best;
    best.distance = std::numeric_limits<double>::infinity();
    double s0 = 0.0;
    for (std::size_t k = 0; k + 1 < line.size(); ++k) {
      const Point d = line[k + 1] - line[k];
      const double len = d.norm();
      const double t = std::clamp((x - line[k]).dot(d) / (len * len), 0.0, 1.0);
      const Point c = line[k] + t * d;
      const double dist = (x - c).norm();
      if (dist < best.distance) best = {c, s0 + t * len, dist};
      s0 += len;
    }
    return best;
  }

  // Snaps the interior vertices of one chain onto the other chain's polyline,
  // deletes the element and threads the snapped vertices into the neighbours.
  bool collapse_interior(Index e, const std::vector<Index>& chain_a, const std::vector<Index>& chain_b) {
    struct Plan {
      const std::vector<Index>* target;
      const std::vector<Index>* moving;
      std::vector<Projection> proj;
      double cost = std::numeric_limits<double>::infinity();
    };
    const double hE = geometry::diameter(gather(nodes_, elements_[e]));
    auto make_plan = [&](const std::vector<Index>& target, const std::vector<Index>& moving) {
      Plan plan{&target, &moving, {}, std::numeric_limits<double>::infinity()};
      if (moving.size() < 3) return plan;
      std::vector<Point> line;
      for (Index v : target) line.push_back(nodes_[v]);
      double length = 0.0;
      for (std::size_t k = 0; k + 1 < line.size(); ++k) length += (line[k + 1] - line[k]).norm();
      const double tol = 1e-9 * length;
      double cost = 0.0;
      double prev = length;  // moving runs from the target's end back to its start
      for (std::size_t k = 1; k + 1 < moving.size(); ++k) {
        const Index v = moving[k];
        if (on_gamma_[v]) return plan;
        Projection pr = project_onto_polyline(line, nodes_[v]);
        if (!(pr.s < prev - tol) || !(pr.s > tol)) return plan;
        double s_acc = 0.0;
        for (std::size_t j = 0; j + 1 < line.size(); ++j) {
          s_acc += (line[j + 1] - line[j]).norm();
          if (j + 2 < line.size() && std::abs(s_acc - pr.s) <= tol) return plan;
        }
        prev = pr.s;
        cost = std::max(cost, pr.distance);
        plan.proj.push_back(pr);
      }
      if (cost > eps_ * hE) return plan;
      plan.cost = cost;
      return plan;
    };
    Plan pa = make_plan(chain_a, chain_b);
    Plan pb = make_plan(chain_b, chain_a);
    Plan& plan = pa.cost <= pb.cost ? pa : pb;
    if (!std::isfinite(plan.cost)) return false;

    const auto& target = *plan.target;
    const auto& moving = *plan.moving;
    std::vector<double> s_target{0.0};
    for (std::size_t k = 0; k + 1 < target.size(); ++k)
      s_target.push_back(s_target.back() + (nodes_[target[k + 1]] - nodes_[target[k]]).norm());
    // Parameter of every vertex along the target line.
    std::vector<std::pair<double, Index>> moving_s, target_s;
    for (std::size_t k = 1; k + 1 < moving.size(); ++k) moving_s.emplace_back(plan.proj[k - 1].s, moving[k]);
    for (std::size_t k = 1; k + 1 < target.size(); ++k) target_s.emplace_back(s_target[k], target[k]);
    std::vector<double> s_moving{s_target.back()};
    for (const auto& [s, v] : moving_s) s_moving.push_back(s);
    s_moving.push_back(0.0);

    const auto saved_nodes = nodes_;
    const auto saved_elements = elements_;
    std::vector<Index> touched;
    std::set<Index> across_target;
    for (std::size_t k = 0; k + 1 < target.size(); ++k) {
      const auto nb = neighbour(target[k], target[k + 1]);
      if (!nb) return false;
      across_target.insert(*nb);
    }
    for (std::size_t k = 0; k + 1 < moving.size(); ++k) {
      const auto nb = neighbour(moving[k], moving[k + 1]);
      if (!nb || across_target.count(*nb)) return false;
    }

    // Neighbour across target edge (t_k -> t_k+1) runs t_k+1 -> t_k: insert the
    // moved vertices with parameter in between, in decreasing order.
    for (std::size_t k = 0; k + 1 < target.size(); ++k) {
      std::vector<Index> ins;
      for (auto it = moving_s.begin(); it != moving_s.end(); ++it)
        if (it->first > s_target[k] && it->first < s_target[k + 1]) ins.push_back(it->second);
      insert_between(*neighbour(target[k], target[k + 1]), target[k + 1], target[k], ins);
    }
    // Neighbour across moving edge (m_k -> m_k+1) runs m_k+1 -> m_k, i.e. with
    // increasing parameter: insert the target's interior vertices in between.
    for (std::size_t k = 0; k + 1 < moving.size(); ++k) {
      std::vector<Index> ins;
      for (const auto& [s, v] : target_s)
        if (s > s_moving[k + 1] && s < s_moving[k]) ins.push_back(v);
      insert_between(*neighbour(moving[k], moving[k + 1]), moving[k + 1], moving[k], ins);
    }
    for (std::size_t k = 1; k + 1 < moving.size(); ++k) {
      nodes_[moving[k]] = plan.proj[k - 1].point;
      touched.push_back(moving[k]);
    }
    for (std::size_t k = 1; k + 1 < target.size(); ++k) touched.push_back(target[k]);
    alive_[e] = 0;
    if (!neighbours_valid(touched)) {
      alive_[e] = 1;
      nodes_ = saved_nodes;
      elements_ = saved_elements;
      return false;
    }
    return true;
  }

  void insert_between(Index e, Index a, Index b, const std::vector<Index>& ins) {
    if (ins.empty()) return;
    auto& el = elements_[e];
    for (std::size_t k = 0; k < el.size(); ++k)
      if (el[k] == a && el[(k + 1) % el.size()] == b) {
        el.insert(el.begin() + static_cast<std::ptrdiff_t>(k + 1), ins.begin(), ins.end());
        return;
      }
  }

  bool neighbours_valid(const std::vector<Index>& touched) const {
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      if (!alive_[e]) continue;
      const auto& el = elements_[e];
      const bool hit =
          std::any_of(el.begin(), el.end(), [&](Index v) { return std::find(touched.begin(), touched.end(), v) != touched.end(); });
      if (hit && !valid_polygon(nodes_, el)) return false;
    }
    return true;
  }

  std::vector<Point> nodes_;
  std::vector<std::vector<Index>> elements_;
  std::vector<char> alive_;
  std::vector<char> on_gamma_;
  std::vector<char> on_boundary_;
  std::unordered_map<std::uint64_t, Index> owner_;
  const DomainDescriptor& domain_;
  double eps_;
};

}  // namespace

BulkSurfaceMesh collapse_small_angles(const BulkSurfaceMesh& mesh, const DomainDescriptor& domain, double eps,
                                      GenerationReport* report) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("collapse_small_angles: eps must lie in (0, 1/2)");
  Collapser c(mesh, domain, eps);
  GenerationReport local;
  c.run(&local);
  if (report) {
    report->collapsed_elements += local.collapsed_elements;
    report->skipped_collapses += local.skipped_collapses;
  }
  if (local.collapsed_elements == 0) return mesh;
  return c.result();
}

BulkSurfaceMesh generate_cartesian_cut(const DomainDescriptor& domain, double h, double eps,
                                       GenerationReport* report) {
  if (!(h > 0.0) || !(h < domain.fermi_halfwidth)) {
    std::ostringstream os;
    os << "h = " << h << " violates 0 < h < fermi_halfwidth = " << domain.fermi_halfwidth;
    throw MeshGenerationError(os.str());
  }
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("eps must lie in (0, 1/2)");

  const auto& box = domain.bounds;
  const long i0 = static_cast<long>(std::floor(box.lower.x() / h)) - 1;
  const long i1 = static_cast<long>(std::ceil(box.upper.x() / h)) + 1;
  const long j0 = static_cast<long>(std::floor(box.lower.y() / h)) - 1;
  const long j1 = static_cast<long>(std::ceil(box.upper.y() / h)) + 1;
  const long ni = i1 - i0 + 1, nj = j1 - j0 + 1;
  auto at = [&](long i, long j) { return static_cast<std::size_t>((i - i0) * nj + (j - j0)); };
  auto grid_point = [&](long i, long j) { return Point(static_cast<double>(i) * h, static_cast<double>(j) * h); };

  std::vector<char> inside(static_cast<std::size_t>(ni * nj));
  for (long i = i0; i <= i1; ++i)
    for (long j = j0; j <= j1; ++j) inside[at(i, j)] = domain.levelset(grid_point(i, j)) < -1e-12 ? 1 : 0;

  std::vector<Index> id(inside.size(), -1);
  std::vector<Point> nodes;
  auto node = [&](long i, long j) {
    Index& slot = id[at(i, j)];
    if (slot < 0) {
      const Point x = grid_point(i, j);
      slot = static_cast<Index>(nodes.size());
      nodes.push_back(inside[at(i, j)] ? x : domain.closest_point(x));
    }
    return slot;
  };

  std::vector<std::vector<Index>> elements;
  Index full = 0, cut = 0;
  for (long j = j0; j < j1; ++j)
    for (long i = i0; i < i1; ++i) {
      const int c = inside[at(i, j)] + inside[at(i + 1, j)] + inside[at(i + 1, j + 1)] + inside[at(i, j + 1)];
      if (c == 0) continue;
      if (c == 4) ++full;
      else ++cut;
      elements.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)});
    }
  if (full == 0) {
    std::ostringstream os;
    os << "h = " << h << " is too large: no grid square lies strictly inside the domain";
    throw MeshGenerationError(os.str());
  }
  for (const auto& el : elements)
    if (!(geometry::signed_area(gather(nodes, el)) > 0.0))
      throw MeshGenerationError("cut cell with nonpositive area; reduce h");

  GenerationReport local;
  local.cut_cells = cut;
  BulkSurfaceMesh m = build_mesh(std::move(nodes), std::move(elements));
  for (int round = 0; round < 8; ++round) {
    Index merged = 0;
    m = merge_close_nodes(m, eps, &merged);
    local.merged_nodes += merged;
    const Index before = local.collapsed_elements;
    m = collapse_small_angles(m, domain, eps, &local);
    if (merged == 0 && local.collapsed_elements == before) break;
  }
  local.kappa = boundary_kappa(m, domain);
  if (report) *report = local;
  return m;
}

}  // namespace bsvem::mesh
