#include "bsvem/error.hpp"
#include "bsvem/polygon.hpp"
#include "bsvem/vem.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace bsvem;
using namespace bsvem::vem;

namespace {

Polygon unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

// Star-shaped with respect to the origin: sorted angles, random radii.
Polygon random_star_polygon(std::mt19937& rng) {
  std::uniform_int_distribution<int> arity(3, 10);
  std::uniform_real_distribution<double> r(0.3, 1.0), t(0, 2 * std::numbers::pi), s(0.05, 20.0);
  const int n = arity(rng);
  std::vector<double> ang(n);
  for (auto& a : ang) a = t(rng);
  std::sort(ang.begin(), ang.end());
  const double scale = s(rng);
  const Point shift(t(rng), -t(rng));
  Polygon p;
  for (double a : ang) {
    const double rr = r(rng);
    p.push_back(shift + scale * Point(rr * std::cos(a), rr * std::sin(a)));
  }
  return p;
}

bool usable(const Polygon& p) {
  if (geometry::signed_area(p) <= 1e-6 * std::pow(geometry::diameter(p), 2)) return false;
  return geometry::is_simple(p) && geometry::min_vertex_distance(p) > 1e-3 * geometry::diameter(p);
}

Vector linear_dofs(const Polygon& p, double a, double b, double c) {
  Vector v(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) v(i) = a + b * p[i].x() + c * p[i].y();
  return v;
}

// Integral of a quadratic over a polygon that is star-shaped about `o`:
// fan about o, edge-midpoint rule on each triangle.
template <class F>
double fan_integral(const Polygon& p, const Point& o, F&& f) {
  double s = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Point& a = p[k];
    const Point& b = p[(k + 1) % p.size()];
    const double area = 0.5 * cross(a - o, b - o);
    s += area / 3.0 * (f(0.5 * (o + a)) + f(0.5 * (a + b)) + f(0.5 * (b + o)));
  }
  return s;
}

// Linear polynomial values of Pi v, evaluated from its monomial coefficients.
struct LinearFromProjector {
  Eigen::Vector3d coeffs;
  Point c;
  double h;
  double operator()(const Point& x) const {
    return coeffs(0) + coeffs(1) * (x.x() - c.x()) / h + coeffs(2) * (x.y() - c.y()) / h;
  }
  Point gradient() const { return Point(coeffs(1) / h, coeffs(2) / h); }
};

}  // namespace

TEST(Projector, UnitSquareHandOracle) {
  const auto d = local_projector(unit_square());
  const double s = 1.0 / (2.0 * std::sqrt(2.0));
  Eigen::Vector3d b0(0.25, -s, -s);
  EXPECT_LE((d.B.col(0) - b0).cwiseAbs().maxCoeff(), 1e-15);
  Vector col0(4);
  col0 << 0.75, 0.25, -0.25, 0.25;
  EXPECT_LE((d.pi_nabla.col(0) - col0).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((d.pi_nabla * d.pi_nabla - d.pi_nabla).cwiseAbs().maxCoeff(), 1e-14);
  const Vector x = linear_dofs(unit_square(), 0, 1, 0);
  EXPECT_LE((d.pi_nabla * x - x).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_DOUBLE_EQ(d.area, 1.0);
  EXPECT_DOUBLE_EQ(d.h_E, std::sqrt(2.0));
}

TEST(Projector, VertexModeOnSquare) {
  // On the square both normalisations give the same constant part.
  const auto e = local_projector(unit_square(), {StabScaling::Paper, PiNablaZeroMode::Edge});
  const auto v = local_projector(unit_square(), {StabScaling::Paper, PiNablaZeroMode::Vertex});
  EXPECT_LE((e.pi_nabla - v.pi_nabla).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_DOUBLE_EQ(v.B(0, 2), 0.25);
}

TEST(Projector, TriangleIsIdentity) {
  const auto d = local_projector({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_LE((d.pi_nabla - DenseMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Projector, DegenerateElements) {
  try {
    local_projector({{0, 0}, {1, 0}, {2, 0}}, {}, 17);
    FAIL() << "expected DegenerateElement";
  } catch (const DegenerateElement& e) {
    ASSERT_EQ(e.elements().size(), 1u);
    EXPECT_EQ(e.elements()[0], 17);
  }
  EXPECT_THROW(local_projector({{0, 0}, {0, 1}, {1, 0}}), DegenerateElement);  // clockwise
  EXPECT_THROW(local_projector({{0, 0}, {1, 0}}), DegenerateElement);
}

TEST(Projector, RandomPolygonProperties) {
  std::mt19937 rng(2024);
  int tested = 0;
  for (int trial = 0; tested < 1000; ++trial) {
    const auto p = random_star_polygon(rng);
    if (!usable(p)) continue;
    ++tested;
    for (auto mode : {PiNablaZeroMode::Edge, PiNablaZeroMode::Vertex}) {
      const auto d = local_projector(p, {StabScaling::Paper, mode});
      const double scale = std::max(1.0, d.pi_nabla.cwiseAbs().maxCoeff());
      ASSERT_LE((d.pi_nabla * d.pi_nabla - d.pi_nabla).cwiseAbs().maxCoeff(), 1e-12 * scale) << trial;
      for (auto [a, b, c] : {std::tuple{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.3, -2.0, 1.5}}) {
        const Vector v = linear_dofs(p, a, b, c);
        ASSERT_LE((d.pi_nabla * v - v).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST(Stiffness, RightTriangleOracle) {
  const auto d = local_projector({{0, 0}, {1, 0}, {0, 1}});
  DenseMatrix k(3, 3);
  k << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
  EXPECT_LE((local_stiffness(d) - k).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Stiffness, UnitSquareOracle) {
  const auto d = local_projector(unit_square());
  // Consistency: gradients of Pi phi_i are (+-1/2, +-1/2); stabilisation is
  // h_E (I - Pi)^T (I - Pi) = h_E / 4 * w w^T with w the hourglass vector.
  std::vector<Point> g{{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  Vector w(4);
  w << 1, -1, 1, -1;
  DenseMatrix expected(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) expected(i, j) = g[i].dot(g[j]) + std::sqrt(2.0) / 4.0 * w(i) * w(j);
  EXPECT_LE((local_stiffness(d) - expected).cwiseAbs().maxCoeff(), 1e-14);
  DenseMatrix classic = expected;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) classic(i, j) = g[i].dot(g[j]) + 0.25 * w(i) * w(j);
  EXPECT_LE((local_stiffness(d, {StabScaling::Classic, PiNablaZeroMode::Edge}) - classic).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Stiffness, UnitSquareConsistencyWithHandProjector) {
  const auto d = local_projector(unit_square());
  const DenseMatrix k = local_stiffness(d);
  for (int i = 0; i < 4; ++i) {
    Vector hat = Vector::Zero(4);
    hat(i) = 1.0;
    // grad Pi hat_i from the hand-computed projector column.
    const Point g(i == 1 || i == 2 ? 0.5 : -0.5, i >= 2 ? 0.5 : -0.5);
    for (auto [b, c] : {std::pair{1.0, 0.0}, {0.0, 1.0}}) {
      const Vector p = linear_dofs(unit_square(), 0, b, c);
      EXPECT_NEAR(hat.dot(k * p), g.dot(Point(b, c)), 1e-14);
    }
  }
}

TEST(Stiffness, RandomPolygonConsistencyAndKernel) {
  std::mt19937 rng(99);
  int tested = 0;
  while (tested < 1000) {
    const auto p = random_star_polygon(rng);
    if (!usable(p)) continue;
    ++tested;
    for (auto scaling : {StabScaling::Paper, StabScaling::Classic}) {
      const VemOptions opts{scaling, PiNablaZeroMode::Edge};
      const auto d = local_projector(p, opts);
      const DenseMatrix k = local_stiffness(d, opts);
      const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
      ASSERT_EQ(k, DenseMatrix(k.transpose()));
      ASSERT_LE((k * Vector::Ones(p.size())).cwiseAbs().maxCoeff(), 1e-12 * scale);
      // a_E(v, p) = int grad Pi v . grad p for every v and linear p.
      const Vector v = Vector::Random(p.size());
      const LinearFromProjector pv{d.pi_nabla_star * v, d.centroid, d.h_E};
      for (auto [b, c] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {0.7, -0.4}}) {
        const Vector q = linear_dofs(p, 0.2, b, c);
        const double rhs = d.area * pv.gradient().dot(Point(b, c));
        ASSERT_NEAR(v.dot(k * q), rhs, 1e-12 * std::max(1.0, std::abs(rhs)) * scale);
        // Patch test against linear q2.
        const Vector q2 = linear_dofs(p, -1.0, c, b);
        ASSERT_NEAR(q2.dot(k * q), d.area * Point(c, b).dot(Point(b, c)), 1e-12 * scale * std::max(1.0, d.area));
      }
      // Stability sandwich.
      for (int r = 0; r < 3; ++r) {
        const Vector x = Vector::Random(p.size());
        ASSERT_GE(x.dot(k * x), -1e-12 * scale * x.squaredNorm());
      }
    }
  }
}

TEST(Mass, RightTriangleOracle) {
  const auto d = local_projector({{0, 0}, {1, 0}, {0, 1}});
  DenseMatrix m(3, 3);
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  m /= 24.0;
  EXPECT_LE((local_mass(d) - m).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Mass, UnitSquareConstant) {
  const auto d = local_projector(unit_square());
  EXPECT_NEAR(Vector::Ones(4).dot(local_mass(d) * Vector::Ones(4)), 1.0, 1e-14);
}

TEST(Mass, UnitSquareTensorGaussOracle) {
  const auto d = local_projector(unit_square());
  const DenseMatrix m = local_mass(d);
  // int Pi phi_i Pi phi_j with a 2x2 Gauss rule (exact for bilinear), plus area * S.
  const double g = 0.5 / std::sqrt(3.0);
  const double qx[2] = {0.5 - g, 0.5 + g};
  const DenseMatrix ip = DenseMatrix::Identity(4, 4) - d.pi_nabla;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const LinearFromProjector pi{d.pi_nabla_star.col(i), d.centroid, d.h_E};
      const LinearFromProjector pj{d.pi_nabla_star.col(j), d.centroid, d.h_E};
      double s = 0;
      for (double x : qx)
        for (double y : qx) s += 0.25 * pi({x, y}) * pj({x, y});
      s += ip.col(i).dot(ip.col(j));
      EXPECT_NEAR(m(i, j), s, 1e-15);
    }
}

TEST(Mass, RandomPolygonConsistencyAndDefiniteness) {
  std::mt19937 rng(5);
  int tested = 0;
  while (tested < 200) {
    const auto p = random_star_polygon(rng);
    if (!usable(p)) continue;
    ++tested;
    const auto d = local_projector(p);
    const DenseMatrix m = local_mass(d);
    ASSERT_EQ(m, DenseMatrix(m.transpose()));
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m);
    ASSERT_GT(es.eigenvalues().minCoeff(), 0.0);
    // Fan about a kernel point, independent of the implementation's quadrature.
    const Point o = geometry::kernel_ball(p).center;
    const Vector v = Vector::Random(p.size());
    const LinearFromProjector pv{d.pi_nabla_star * v, d.centroid, d.h_E};
    const Vector q = linear_dofs(p, 0.4, -0.3, 0.9);
    const double oracle = fan_integral(p, o, [&](const Point& x) { return pv(x) * (0.4 - 0.3 * x.x() + 0.9 * x.y()); });
    ASSERT_NEAR(v.dot(m * q), oracle, 1e-12 * std::max(1.0, std::abs(oracle)) * std::max(1.0, m.cwiseAbs().maxCoeff()));
    ASSERT_NEAR(Vector::Ones(p.size()).dot(m * Vector::Ones(p.size())), d.area, 1e-12 * std::max(1.0, d.area));
  }
}

TEST(Triangles, DirichletEnergyMatchesP1) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Polygon t{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
    if (geometry::signed_area(t) < 0) std::swap(t[1], t[2]);
    if (geometry::signed_area(t) < 1e-3) continue;
    const auto d = local_projector(t);
    const Vector v = Vector::Random(3);
    // Gradient of the P1 interpolant from the 2x2 system.
    Eigen::Matrix2d jm;
    jm << (t[1] - t[0]).transpose(), (t[2] - t[0]).transpose();
    const Eigen::Vector2d grad = jm.inverse() * Eigen::Vector2d(v(1) - v(0), v(2) - v(0));
    EXPECT_NEAR(v.dot(local_stiffness(d) * v), geometry::signed_area(t) * grad.squaredNorm(),
                1e-12 * std::max(1.0, grad.squaredNorm()));
  }
}

TEST(EdgeMatrices, Examples) {
  const auto one = surface_edge_matrices(1.0);
  Eigen::Matrix2d m;
  m << 1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3;
  EXPECT_LE((one.mass - m).cwiseAbs().maxCoeff(), 1e-16);
  const auto two = surface_edge_matrices(2.0);
  Eigen::Matrix2d k;
  k << 0.5, -0.5, -0.5, 0.5;
  EXPECT_EQ(two.stiffness, k);
  EXPECT_EQ((two.stiffness * Eigen::Vector2d::Ones()).norm(), 0.0);
  EXPECT_THROW(surface_edge_matrices(0.0), DegenerateEdge);
  EXPECT_THROW(surface_edge_matrices(-1.0), DegenerateEdge);
}

TEST(Options, Parsing) {
  EXPECT_EQ(parse_stab_scaling("paper"), StabScaling::Paper);
  EXPECT_EQ(parse_stab_scaling("classic"), StabScaling::Classic);
  EXPECT_EQ(parse_pinabla_zero_mode("vertex"), PiNablaZeroMode::Vertex);
  EXPECT_EQ(to_string(PiNablaZeroMode::Edge), "edge");
  EXPECT_THROW(parse_stab_scaling("other"), InvalidArgument);
}
