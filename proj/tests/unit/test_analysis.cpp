#include "bsvem/analysis.hpp"
#include "bsvem/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace bsvem;
using namespace bsvem::analysis;

TEST(Eoc, Examples) {
  auto r = eoc({1.0, 0.25}, {1.0, 0.5});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(*r[0], 2.0, 1e-14);
  r = eoc({1.0, 0.125}, {1.0, 0.5});
  EXPECT_NEAR(*r[0], 3.0, 1e-14);
  r = eoc({1.0, 0.0}, {1.0, 0.5});
  EXPECT_FALSE(r[0]);
  EXPECT_THROW(eoc({1.0}, {1.0, 0.5}), InvalidArgument);
  EXPECT_THROW(eoc({1.0, 0.5}, {0.5, 1.0}), InvalidArgument);
}

TEST(Eoc, ReferenceColumn) {
  const std::vector<double> h{7.0711e-1, 3.5355e-1, 1.7678e-1, 8.8388e-2, 4.7611e-2};
  const std::vector<double> e{5.1214e-2, 1.3589e-2, 3.6711e-3, 9.5200e-4, 2.4681e-4};
  const auto r = eoc(e, h);
  // Oracle: reference rates for this error column.
  const double expected[] = {1.9141, 1.8881, 1.9472, 2.1820};
  for (int i = 0; i < 4; ++i) {
    const double direct = std::log(e[i] / e[i + 1]) / std::log(h[i] / h[i + 1]);
    EXPECT_NEAR(*r[i], direct, 1e-12);
    EXPECT_NEAR(*r[i], expected[i], 1e-3);
  }
}

TEST(Eoc, SyntheticRate) {
  std::vector<double> h, e;
  for (int i = 0; i < 6; ++i) {
    h.push_back(0.3 * std::pow(0.55, i));
    e.push_back(7.0 * std::pow(h.back(), 1.7));
  }
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_NEAR(*eoc(e, h)[i - 1], 1.7, 1e-12);
}

namespace {

geometry::AnalyticField linear(double a, double b, double c, geometry::Support s = geometry::Support::Bulk) {
  return {[=](const Point& x, double) { return a + b * x.x() + c * x.y(); }, s};
}

}  // namespace

TEST(Norms, LinearIsReproduced) {
  const auto m = mesh::generate_cartesian_cut(geometry::unit_disc(), 0.25);
  const auto f = linear(0.3, -1.2, 2.0);
  const Vector xi = vem::interpolate_bulk(f, m);
  EXPECT_LE(l2_error_bulk(xi, m, f), 1e-13);
  EXPECT_LE(linf_error(xi, m, f, 0.0, Where::Bulk), 1e-14);
}

TEST(Norms, ConstantOffset) {
  const auto m = mesh::generate_cartesian_cut(geometry::unit_disc(), 0.25);
  const auto f = linear(0.3, -1.2, 2.0);
  const Vector xi = vem::interpolate_bulk(f, m).array() + 0.5;
  EXPECT_NEAR(l2_error_bulk(xi, m, f), 0.5 * std::sqrt(mesh::total_area(m)), 1e-12);
  EXPECT_NEAR(linf_error(xi, m, f, 0.0, Where::Bulk), 0.5, 1e-14);
  const auto g = linear(1.0, 0.0, 0.0, geometry::Support::Surface);
  const Vector eta = Vector::Constant(m.num_boundary_nodes, 1.25);
  EXPECT_NEAR(linf_error(eta, m, g, 0.0, Where::Surface), 0.25, 1e-14);
  // Boundary polygon length oracle.
  double len = 0.0;
  for (const auto& e : m.boundary_edges) len += (m.nodes[e[1]] - m.nodes[e[0]]).norm();
  EXPECT_NEAR(l2_error_surface(eta, m, g), 0.25 * std::sqrt(len), 1e-12);
}

TEST(Norms, Homogeneity) {
  const auto m = mesh::generate_cartesian_cut(geometry::unit_disc(), 0.25);
  const auto fs = geometry::experiment_fields("elliptic-xy", 1, 2);
  const Vector xi = Vector::Zero(m.num_nodes());
  const geometry::AnalyticField twice{[&](const Point& x, double t) { return 2 * fs.at("u")(x, t); }};
  EXPECT_NEAR(l2_error_bulk(xi, m, twice), 2 * l2_error_bulk(xi, m, fs.at("u")), 1e-13);
}

TEST(Norms, InterpolantDecaysQuadratically) {
  const auto fs = geometry::experiment_fields("elliptic-xy", 1, 2);
  std::vector<double> e, h;
  for (double s : {0.25, 0.125, 0.0625}) {
    const auto m = mesh::generate_cartesian_cut(geometry::unit_disc(), s);
    e.push_back(l2_error_bulk(vem::interpolate_bulk(fs.at("u"), m), m, fs.at("u")));
    h.push_back(m.meshsize);
  }
  const auto r = eoc(e, h);
  EXPECT_GT(*r[1], 1.7);
}

TEST(Norms, MassNorm) {
  const auto m = linalg::SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {1, 1, 8.0}});
  Vector v(2), ex(2);
  v << 1.0, 1.0;
  ex << 0.0, 0.5;
  EXPECT_NEAR(mass_norm_error(v, m, ex), std::sqrt(2.0 + 2.0), 1e-15);
}

TEST(Study, Errors) {
  StudyConfig cfg;
  cfg.levels = 1;
  EXPECT_THROW(run_convergence_study(cfg), InsufficientLevels);
  cfg.levels = 2;
  cfg.experiment = "nope";
  EXPECT_THROW(run_convergence_study(cfg), NotFound);
  EXPECT_THROW(parse_error_norm("h1"), InvalidArgument);
  EXPECT_THROW(parse_mesh_family("quads"), InvalidArgument);
  EXPECT_EQ(parse_mesh_family("triangles"), MeshFamily::StructuredTriangles);
}

TEST(Study, RingFamily) {
  const int expected[] = {3, 5, 10, 20, 40};
  for (int i = 0; i < 5; ++i) EXPECT_EQ(family_rings(i), expected[i]);
}

TEST(Study, TwoLevelEllipticCsv) {
  StudyConfig cfg;
  cfg.levels = 2;
  const auto t = run_convergence_study(cfg);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_FALSE(t.l2_eoc[0]);
  ASSERT_TRUE(t.l2_eoc[1]);
  EXPECT_GT(*t.l2_eoc[1], 1.5);
  EXPECT_EQ(t.rows[0].n_elements, 16);
  EXPECT_EQ(t.rows[1].n_elements, 60);
  ASSERT_TRUE(t.rows[0].cond);
  EXPECT_GT(*t.rows[0].cond, 1.0);
  for (const auto& r : t.rows) {
    EXPECT_TRUE(r.failure.empty());
    EXPECT_NEAR(r.l2, std::hypot(r.l2_bulk, r.l2_surface), 1e-15);
    EXPECT_DOUBLE_EQ(r.linf, std::max(r.linf_bulk, r.linf_surface));
  }
  std::istringstream csv(t.to_csv());
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "h,tau,l2_err,l2_eoc,linf_err,linf_eoc,n_elements,n_boundary_elements,cond_estimate");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Study, ParabolicRecordsTau) {
  StudyConfig cfg;
  cfg.experiment = "parabolic-xy";
  cfg.levels = 2;
  cfg.T = 0.05;
  cfg.tau0 = 1e-2;
  cfg.condition = false;
  const auto t = run_convergence_study(cfg);
  ASSERT_TRUE(t.rows[1].tau);
  EXPECT_DOUBLE_EQ(*t.rows[1].tau, 2.5e-3);
  EXPECT_FALSE(t.rows[0].cond);
}
