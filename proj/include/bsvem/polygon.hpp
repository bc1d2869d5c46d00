#pragma once

#include "bsvem/types.hpp"

#include <span>

namespace bsvem::geometry {

// Shoelace area, positive for counterclockwise vertex order.
double signed_area(std::span<const Point> poly);

// Area centroid. Requires nonzero signed area.
Point centroid(std::span<const Point> poly);

double diameter(std::span<const Point> poly);
double perimeter(std::span<const Point> poly);
double min_vertex_distance(std::span<const Point> poly);

// Interior angle at every vertex of a counterclockwise polygon, in [0, 2pi).
std::vector<double> interior_angles(std::span<const Point> poly);

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d);
bool is_simple(std::span<const Point> poly);
bool contains(std::span<const Point> poly, const Point& x);

struct KernelBall {
  Point center = Point::Zero();
  double radius = 0.0;  // <= 0 when the kernel is empty or has no interior
};

// Largest ball inside the kernel (intersection of the inner half-planes of all
// edges). Exact for small polygons: every triple of active constraints is tried.
KernelBall kernel_ball(std::span<const Point> poly);

}  // namespace bsvem::geometry
