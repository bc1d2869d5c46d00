#pragma once

#include "bsvem/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace bsvem::geometry {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

struct BoundingBox {
  Point lower = Point::Zero();
  Point upper = Point::Zero();
};

// Smooth bulk domain. `levelset` only needs the right sign (negative inside);
// `signed_distance` is the true distance to Gamma within the Fermi stripe.
struct DomainDescriptor {
  std::string name;
  ScalarField levelset;
  ScalarField signed_distance;
  VectorField closest_point;
  VectorField outward_normal;
  double fermi_halfwidth = 0.0;
  BoundingBox bounds;
};

DomainDescriptor unit_disc();

// Closest points by damped Newton on [phi(p), (x - p) x grad phi(p)], with a
// bisection along the gradient ray as fallback. Throws ProjectionFailure when
// the query lies farther than `band` from the zero level set.
DomainDescriptor implicit_domain(ScalarField levelset, VectorField gradient, double band, BoundingBox bounds);

// x^2/a^2 + y^2/b^2 - 1 through implicit_domain.
DomainDescriptor ellipse(double a, double b);

enum class Support { Bulk, Surface };

struct AnalyticField {
  std::function<double(const Point&, double)> value;
  Support support = Support::Bulk;

  double operator()(const Point& x, double t = 0.0) const { return value(x, t); }
};

AnalyticField constant_field(double c, Support support = Support::Bulk);

using FieldSet = std::map<std::string, AnalyticField, std::less<>>;

// "elliptic-xy" -> {u, v, f, g}; "parabolic-xy" -> {u, v, u0, v0}.
FieldSet experiment_fields(std::string_view which, double alpha, double beta);

}  // namespace bsvem::geometry
