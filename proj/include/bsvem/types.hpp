#pragma once

#include <Eigen/Dense>

#include <vector>

namespace bsvem {

using Index = int;
using Point = Eigen::Vector2d;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

using Polygon = std::vector<Point>;

inline double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace bsvem
