#include "bsvem/geometry.hpp"

#include "bsvem/error.hpp"

#include <cmath>
#include <sstream>

namespace bsvem::geometry {

namespace {

std::string describe(const Point& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x.x() << ", " << x.y() << ")";
  return os.str();
}

Eigen::Matrix2d fd_hessian(const VectorField& grad, const Point& p) {
  const double d = 1e-6 * std::max(1.0, p.norm());
  Eigen::Matrix2d h;
  for (int j = 0; j < 2; ++j) {
    Point e = Point::Zero();
    e[j] = d;
    h.col(j) = (grad(p + e) - grad(p - e)) / (2.0 * d);
  }
  return 0.5 * (h + h.transpose());
}

struct NewtonResult {
  Point p;
  bool converged = false;
};

NewtonResult newton_project(const ScalarField& phi, const VectorField& grad, const Point& x, Point p) {
  auto residual = [&](const Point& q) {
    const Point g = grad(q);
    return Eigen::Vector2d(phi(q) / std::max(g.norm(), 1e-300), cross(x - q, g) / std::max(g.norm(), 1e-300));
  };
  const double tol = 1e-13 * std::max(1.0, x.norm());
  for (int it = 0; it < 50; ++it) {
    const Point g = grad(p);
    const double gn = g.norm();
    if (!(gn > 0.0)) return {p, false};
    const Eigen::Matrix2d h = fd_hessian(grad, p);
    const Point r = x - p;
    Eigen::Matrix2d jac;
    jac.row(0) = g.transpose();
    // d/dp [(x - p) x g(p)]
    jac(1, 0) = -g.y() + r.x() * h(1, 0) - r.y() * h(0, 0);
    jac(1, 1) = g.x() + r.x() * h(1, 1) - r.y() * h(0, 1);
    const Eigen::Vector2d res(phi(p), cross(r, g));
    const Eigen::FullPivLU<Eigen::Matrix2d> lu(jac);
    if (!lu.isInvertible()) return {p, false};
    const Point step = -lu.solve(res);
    if (!step.allFinite()) return {p, false};
    const double r0 = residual(p).norm();
    double damp = 1.0;
    Point next = p + step;
    for (int k = 0; k < 30 && residual(next).norm() > r0 && damp > 1e-8; ++k) {
      damp *= 0.5;
      next = p + damp * step;
    }
    p = next;
    if (damp * step.norm() <= tol && std::abs(phi(p)) / gn <= 1e-12 * std::max(1.0, p.norm()))
      return {p, true};
  }
  const Eigen::Vector2d r = residual(p);
  return {p, r.norm() <= 1e-12 * std::max(1.0, x.norm())};
}

Point bisect_along_gradient(const ScalarField& phi, const VectorField& grad, const Point& x, double reach) {
  const Point g = grad(x);
  const double s0 = phi(x);
  if (s0 == 0.0) return x;
  const Point dir = (s0 > 0 ? -1.0 : 1.0) * g / g.norm();
  double lo = 0.0, hi = 0.0;
  for (double t = reach / 64; t <= reach * 1.0000001; t *= 2.0) {
    if ((phi(x + t * dir) > 0) != (s0 > 0)) {
      hi = t;
      break;
    }
    lo = t;
  }
  if (hi == 0.0) return x;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((phi(x + mid * dir) > 0) == (s0 > 0)) lo = mid;
    else hi = mid;
  }
  return x + 0.5 * (lo + hi) * dir;
}

}  // namespace

DomainDescriptor unit_disc() {
  DomainDescriptor d;
  d.name = "disc";
  d.levelset = [](const Point& x) { return x.norm() - 1.0; };
  d.signed_distance = d.levelset;
  d.closest_point = [](const Point& x) -> Point {
    const double r = x.norm();
    if (r == 0.0) throw DegenerateQuery("closest_point: the origin is equidistant from the whole unit circle");
    return x / r;
  };
  d.outward_normal = [](const Point& p) -> Point { return p / p.norm(); };
  d.fermi_halfwidth = 1.0;
  d.bounds = {Point(-1.0, -1.0), Point(1.0, 1.0)};
  return d;
}

DomainDescriptor implicit_domain(ScalarField levelset, VectorField gradient, double band, BoundingBox bounds) {
  if (!(band > 0.0)) throw InvalidArgument("implicit_domain: band must be positive");
  DomainDescriptor d;
  d.name = "implicit";
  d.levelset = levelset;
  d.fermi_halfwidth = band;
  d.bounds = bounds;
  d.closest_point = [phi = levelset, grad = gradient, band](const Point& x) -> Point {
    const Point g = grad(x);
    const double gn2 = g.squaredNorm();
    if (!(gn2 > 0.0)) throw ProjectionFailure("closest_point: vanishing gradient at " + describe(x), x);
    NewtonResult res = newton_project(phi, grad, x, x - phi(x) * g / gn2);
    if (!res.converged) res = newton_project(phi, grad, x, bisect_along_gradient(phi, grad, x, 2.0 * band));
    if (!res.converged) throw ProjectionFailure("closest_point: no convergence for " + describe(x), x);
    if ((res.p - x).norm() > band)
      throw ProjectionFailure("closest_point: query " + describe(x) + " lies outside the band", x);
    return res.p;
  };
  d.signed_distance = [phi = levelset, cp = d.closest_point](const Point& x) {
    const double s = phi(x);
    if (s == 0.0) return 0.0;
    const double dist = (x - cp(x)).norm();
    return s < 0 ? -dist : dist;
  };
  d.outward_normal = [grad = gradient](const Point& p) -> Point {
    const Point g = grad(p);
    return g / g.norm();
  };
  return d;
}

DomainDescriptor ellipse(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("ellipse: semi-axes must be positive");
  auto phi = [a, b](const Point& x) { return x.x() * x.x() / (a * a) + x.y() * x.y() / (b * b) - 1.0; };
  auto grad = [a, b](const Point& x) -> Point { return Point(2.0 * x.x() / (a * a), 2.0 * x.y() / (b * b)); };
  const double m = std::min(a, b);
  // The evolute keeps the projection single valued for distances below b^2/a.
  const double band = 0.9 * m * m / std::max(a, b);
  auto d = implicit_domain(phi, grad, std::max(band, 0.5 * m), {Point(-a, -b), Point(a, b)});
  d.fermi_halfwidth = band;
  d.name = "ellipse";
  return d;
}

AnalyticField constant_field(double c, Support support) {
  return {[c](const Point&, double) { return c; }, support};
}

FieldSet experiment_fields(std::string_view which, double alpha, double beta) {
  FieldSet out;
  if (which == "elliptic-xy") {
    const double k = (alpha + 2.0) / beta;
    out["u"] = {[](const Point& x, double) { return x.x() * x.y(); }, Support::Bulk};
    out["v"] = {[k](const Point& x, double) { return k * x.x() * x.y(); }, Support::Surface};
    out["f"] = {[](const Point& x, double) { return x.x() * x.y(); }, Support::Bulk};
    out["g"] = {[k](const Point& x, double) { return (2.0 + 5.0 * k) * x.x() * x.y(); }, Support::Surface};
    return out;
  }
  if (which == "parabolic-xy") {
    out["u"] = {[](const Point& x, double t) { return std::exp(-t) * x.x() * x.y(); }, Support::Bulk};
    out["v"] = {[](const Point& x, double t) { return 1.5 * std::exp(-t) * x.x() * x.y(); }, Support::Surface};
    out["u0"] = {[](const Point& x, double) { return x.x() * x.y(); }, Support::Bulk};
    out["v0"] = {[](const Point& x, double) { return 1.5 * x.x() * x.y(); }, Support::Surface};
    return out;
  }
  throw NotFound("unknown experiment '" + std::string(which) + "'");
}

}  // namespace bsvem::geometry
