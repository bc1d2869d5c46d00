#include "bsvem/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bsvem::geometry {

double signed_area(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

Point centroid(std::span<const Point> poly) {
  // Shift by the first vertex to keep the shoelace sums well conditioned.
  const std::size_t n = poly.size();
  const Point o = poly[0];
  double a = 0.0;
  Point c = Point::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = poly[i] - o;
    const Point q = poly[(i + 1) % n] - o;
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return o + c / (3.0 * a);
}

double diameter(std::span<const Point> poly) {
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, (poly[i] - poly[j]).norm());
  return d;
}

double perimeter(std::span<const Point> poly) {
  double p = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) p += (poly[(i + 1) % poly.size()] - poly[i]).norm();
  return p;
}

double min_vertex_distance(std::span<const Point> poly) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::min(d, (poly[i] - poly[j]).norm());
  return d;
}

std::vector<double> interior_angles(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point u = poly[(i + n - 1) % n] - poly[i];
    const Point w = poly[(i + 1) % n] - poly[i];
    double t = std::atan2(cross(w, u), w.dot(u));
    if (t < 0.0) t += 2.0 * std::numbers::pi;
    out[i] = t;
  }
  return out;
}

namespace {

int orient(const Point& a, const Point& b, const Point& c) {
  const double v = cross(b - a, c - a);
  const double scale = (b - a).norm() * (c - a).norm();
  if (std::abs(v) <= 1e-14 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Point& a, const Point& b, const Point& x) {
  return std::min(a.x(), b.x()) <= x.x() && x.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= x.y() && x.y() <= std::max(a.y(), b.y());
}

}  // namespace

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return o1 != o2 && o3 != o4;
}

bool is_simple(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if ((poly[i] - poly[(i + 1) % n]).norm() == 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool contains(std::span<const Point> poly, const Point& x) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y() > x.y()) != (b.y() > x.y()) &&
        x.x() < (b.x() - a.x()) * (x.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

KernelBall kernel_ball(std::span<const Point> poly) {
  // Constraint k: n_k . c - r >= n_k . p_k with n_k the inward unit normal.
  const std::size_t n = poly.size();
  std::vector<Point> nrm;
  std::vector<double> off;
  for (std::size_t i = 0; i < n; ++i) {
    const Point e = poly[(i + 1) % n] - poly[i];
    const double len = e.norm();
    if (len == 0.0) continue;
    const Point in(-e.y() / len, e.x() / len);
    nrm.push_back(in);
    off.push_back(in.dot(poly[i]));
  }
  const std::size_t m = nrm.size();
  const double scale = diameter(poly);
  KernelBall best;
  best.radius = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      for (std::size_t c = b + 1; c < m; ++c) {
        Eigen::Matrix3d sys;
        sys << nrm[a].x(), nrm[a].y(), -1.0, nrm[b].x(), nrm[b].y(), -1.0, nrm[c].x(), nrm[c].y(), -1.0;
        const Eigen::FullPivLU<Eigen::Matrix3d> lu(sys);
        if (!lu.isInvertible()) continue;
        const Eigen::Vector3d sol = lu.solve(Eigen::Vector3d(off[a], off[b], off[c]));
        if (!(sol.z() > best.radius)) continue;
        const Point ctr(sol.x(), sol.y());
        bool feasible = true;
        for (std::size_t k = 0; k < m && feasible; ++k)
          feasible = nrm[k].dot(ctr) - sol.z() >= off[k] - 1e-12 * scale;
        if (feasible) best = {ctr, sol.z()};
      }
  if (!std::isfinite(best.radius)) best.radius = 0.0;
  return best;
}

}  // namespace bsvem::geometry
