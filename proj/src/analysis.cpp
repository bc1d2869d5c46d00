#include "bsvem/analysis.hpp"

#include "bsvem/error.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace bsvem::analysis {

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string sci(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

BulkErrorEvaluator::BulkErrorEvaluator(const mesh::BulkSurfaceMesh& mesh, const vem::VemOptions& opts) {
  static constexpr double bary[3][3] = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
  std::vector<linalg::Triplet> t;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    const vem::LocalElementData d = vem::local_projector(mesh.polygon(e), opts, e);
    const std::size_t n = el.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = d.polygon[i];
      const Point& b = d.polygon[(i + 1) % n];
      const double area = 0.5 * cross(a - d.centroid, b - d.centroid);
      for (const auto& w : bary) {
        const Point x = w[0] * d.centroid + w[1] * a + w[2] * b;
        const Eigen::RowVector3d m(1.0, (x.x() - d.centroid.x()) / d.h_E, (x.y() - d.centroid.y()) / d.h_E);
        const Eigen::RowVectorXd row = m * d.pi_nabla_star;
        const Index r = static_cast<Index>(points_.size());
        for (std::size_t k = 0; k < n; ++k) t.push_back({r, el[k], row[static_cast<Index>(k)]});
        points_.push_back(x);
        weights_.push_back(area / 3.0);
      }
    }
  }
  projection_ = linalg::SparseMatrix::from_triplets(static_cast<Index>(points_.size()), mesh.num_nodes(), std::move(t));
}

double BulkErrorEvaluator::l2(const Vector& xi, const AnalyticField& exact, double time) const {
  const Vector v = linalg::spmv(projection_, xi);
  double s = 0.0;
  for (std::size_t q = 0; q < points_.size(); ++q) {
    const double d = v[static_cast<Index>(q)] - exact(points_[q], time);
    s += weights_[q] * d * d;
  }
  return std::sqrt(std::max(s, 0.0));
}

SurfaceErrorEvaluator::SurfaceErrorEvaluator(const mesh::BulkSurfaceMesh& mesh,
                                             const geometry::DomainDescriptor& domain) {
  const double g = 0.5 / std::sqrt(3.0);
  std::vector<linalg::Triplet> t;
  for (const auto& [a, b] : mesh.boundary_edges) {
    const Point& pa = mesh.nodes[a];
    const Point& pb = mesh.nodes[b];
    const double len = (pb - pa).norm();
    for (double s : {0.5 - g, 0.5 + g}) {
      const Index r = static_cast<Index>(points_.size());
      t.push_back({r, a, 1.0 - s});
      t.push_back({r, b, s});
      points_.push_back(domain.closest_point((1.0 - s) * pa + s * pb));
      weights_.push_back(0.5 * len);
    }
  }
  interpolation_ =
      linalg::SparseMatrix::from_triplets(static_cast<Index>(points_.size()), mesh.num_boundary_nodes, std::move(t));
}

double SurfaceErrorEvaluator::l2(const Vector& eta, const AnalyticField& exact, double time) const {
  const Vector v = linalg::spmv(interpolation_, eta);
  double s = 0.0;
  for (std::size_t q = 0; q < points_.size(); ++q) {
    const double d = v[static_cast<Index>(q)] - exact(points_[q], time);
    s += weights_[q] * d * d;
  }
  return std::sqrt(s);
}

double l2_error_bulk(const Vector& xi, const mesh::BulkSurfaceMesh& mesh, const AnalyticField& exact, double time,
                     const vem::VemOptions& opts) {
  return BulkErrorEvaluator(mesh, opts).l2(xi, exact, time);
}

double l2_error_surface(const Vector& eta, const mesh::BulkSurfaceMesh& mesh, const AnalyticField& exact,
                        double time, const geometry::DomainDescriptor& domain) {
  return SurfaceErrorEvaluator(mesh, domain).l2(eta, exact, time);
}

double linf_error(const Vector& v, const mesh::BulkSurfaceMesh& mesh, const AnalyticField& exact, double time,
                  Where where) {
  const Index n = where == Where::Bulk ? mesh.num_nodes() : mesh.num_boundary_nodes;
  if (v.size() != n) throw ShapeError("linf_error: vector length does not match the mesh");
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(v[i] - exact(mesh.nodes[i], time)));
  return worst;
}

double mass_norm_error(const Vector& v, const linalg::SparseMatrix& mass, const Vector& exact_nodal) {
  const Vector d = v - exact_nodal;
  return std::sqrt(std::max(d.dot(linalg::spmv(mass, d)), 0.0));
}

std::vector<std::optional<double>> eoc(const std::vector<double>& errors, const std::vector<double>& hs) {
  if (errors.size() != hs.size() || errors.size() < 2)
    throw InvalidArgument("eoc: need two or more errors and as many meshsizes");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0)) throw InvalidArgument("eoc: meshsizes must be positive");
    if (i > 0 && !(hs[i] < hs[i - 1])) throw InvalidArgument("eoc: meshsizes must be strictly decreasing");
  }
  std::vector<std::optional<double>> out;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double a = errors[i - 1], b = errors[i];
    if (a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))
      out.emplace_back(std::log(a / b) / std::log(hs[i - 1] / hs[i]));
    else
      out.emplace_back(std::nullopt);
  }
  return out;
}

ErrorNorm parse_error_norm(std::string_view s) {
  if (s == "quadrature") return ErrorNorm::Quadrature;
  if (s == "nodal-mass") return ErrorNorm::NodalMass;
  throw InvalidArgument("norm must be 'quadrature' or 'nodal-mass', got '" + std::string(s) + "'");
}

MeshFamily parse_mesh_family(std::string_view s) {
  if (s == "cartesian" || s == "cartesian-cut") return MeshFamily::CartesianCut;
  if (s == "triangles" || s == "structured-triangles") return MeshFamily::StructuredTriangles;
  throw InvalidArgument("mesh family must be 'cartesian' or 'triangles', got '" + std::string(s) + "'");
}

std::string_view to_string(ErrorNorm n) { return n == ErrorNorm::Quadrature ? "quadrature" : "nodal-mass"; }
std::string_view to_string(MeshFamily f) { return f == MeshFamily::CartesianCut ? "cartesian" : "triangles"; }

int family_rings(int level) { return static_cast<int>(std::ceil(2.5 * std::ldexp(1.0, level))); }

mesh::BulkSurfaceMesh family_mesh(const StudyConfig& cfg, int level) {
  if (cfg.family == MeshFamily::StructuredTriangles) return mesh::structured_disc_triangulation(family_rings(level));
  return mesh::generate_cartesian_cut(geometry::unit_disc(), cfg.base_spacing * std::ldexp(1.0, -level), cfg.eps);
}

namespace {

struct LevelErrors {
  double l2_bulk = 0.0, l2_surface = 0.0, linf_bulk = 0.0, linf_surface = 0.0;
};

class ErrorProbe {
 public:
  ErrorProbe(const mesh::BulkSurfaceMesh& mesh, const vem::GlobalOperators& ops, const StudyConfig& cfg)
      : mesh_(mesh), ops_(ops), norm_(cfg.norm) {
    if (norm_ == ErrorNorm::Quadrature) {
      bulk_.emplace(mesh, cfg.vem);
      surface_.emplace(mesh, geometry::unit_disc());
    }
  }

  LevelErrors measure(const solvers::DiscreteSolution& s, const AnalyticField& u, const AnalyticField& v,
                      double t) const {
    LevelErrors e;
    if (norm_ == ErrorNorm::Quadrature) {
      e.l2_bulk = bulk_->l2(s.bulk, u, t);
      e.l2_surface = surface_->l2(s.surface, v, t);
    } else {
      e.l2_bulk = mass_norm_error(s.bulk, ops_.bulk_mass, vem::interpolate_bulk(u, mesh_, t));
      e.l2_surface = mass_norm_error(s.surface, ops_.surface_mass, vem::interpolate_surface(v, mesh_, t));
    }
    e.linf_bulk = linf_error(s.bulk, mesh_, u, t, Where::Bulk);
    e.linf_surface = linf_error(s.surface, mesh_, v, t, Where::Surface);
    return e;
  }

 private:
  const mesh::BulkSurfaceMesh& mesh_;
  const vem::GlobalOperators& ops_;
  ErrorNorm norm_;
  std::optional<BulkErrorEvaluator> bulk_;
  std::optional<SurfaceErrorEvaluator> surface_;
};

void run_level(const StudyConfig& cfg, int level, ErrorRecord& rec) {
  const mesh::BulkSurfaceMesh m = family_mesh(cfg, level);
  rec.h = m.meshsize;
  rec.n_nodes = m.num_nodes();
  rec.n_boundary_nodes = m.num_boundary_nodes;
  rec.n_elements = m.num_elements();
  rec.n_narrow_band = static_cast<Index>(m.narrow_band_elements.size());
  rec.n_touching = mesh::count_boundary_touching_elements(m);

  vem::AssemblyOptions aopts;
  aopts.vem = cfg.vem;
  aopts.threads = cfg.threads;
  const vem::GlobalOperators ops = vem::assemble(m, aopts);
  rec.computed_local = ops.stats.computed;
  const ErrorProbe probe(m, ops, cfg);
  const auto fields = geometry::experiment_fields(cfg.experiment, cfg.alpha, cfg.beta);

  if (cfg.experiment == "elliptic-xy") {
    const solvers::EllipticProblem prob{cfg.alpha, cfg.beta, fields.at("f"), fields.at("g")};
    const auto sol = solvers::solve_elliptic(m, ops, prob);
    const LevelErrors e = probe.measure(sol, fields.at("u"), fields.at("v"), 0.0);
    rec.l2_bulk = e.l2_bulk;
    rec.l2_surface = e.l2_surface;
    rec.linf_bulk = e.linf_bulk;
    rec.linf_surface = e.linf_surface;
    rec.l2 = std::hypot(e.l2_bulk, e.l2_surface);
    rec.linf = std::max(e.linf_bulk, e.linf_surface);
    if (cfg.condition) {
      const auto sys = solvers::elliptic_block_system(m, ops, prob);
      rec.cond = linalg::condition_estimate(linalg::block_assemble(sys)).condition;
    }
    return;
  }

  const double tau = cfg.tau0 * std::ldexp(1.0, -2 * level);
  rec.tau = tau;
  solvers::ParabolicProblem prob = solvers::parabolic_xy_problem(tau, cfg.T);
  prob.variant = cfg.variant;
  const AnalyticField& u = fields.at("u");
  const AnalyticField& v = fields.at("v");
  auto observer = [&](Index, const solvers::DiscreteSolution& s) {
    const LevelErrors e = probe.measure(s, u, v, s.time);
    rec.l2_bulk = std::max(rec.l2_bulk, e.l2_bulk);
    rec.l2_surface = std::max(rec.l2_surface, e.l2_surface);
    rec.linf_bulk = std::max(rec.linf_bulk, e.linf_bulk);
    rec.linf_surface = std::max(rec.linf_surface, e.linf_surface);
    rec.l2 = std::max(rec.l2, std::hypot(e.l2_bulk, e.l2_surface));
    rec.linf = std::max(rec.linf, std::max(e.linf_bulk, e.linf_surface));
  };
  solvers::solve_parabolic(m, ops, prob, {observer}, cfg.vem);
}

}  // namespace

ConvergenceTable run_convergence_study(const StudyConfig& cfg) {
  if (cfg.levels < 2) throw InsufficientLevels("a convergence study needs at least 2 levels, got " + std::to_string(cfg.levels));
  if (cfg.experiment != "elliptic-xy" && cfg.experiment != "parabolic-xy")
    throw NotFound("unknown experiment '" + cfg.experiment + "'");
  ConvergenceTable table;
  table.experiment = cfg.experiment;
  for (int level = 0; level < cfg.levels; ++level) {
    ErrorRecord rec;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run_level(cfg, level, rec);
    } catch (const std::exception& e) {
      rec.failure = e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    table.rows.push_back(rec);
  }
  table.l2_eoc.assign(table.rows.size(), std::nullopt);
  table.linf_eoc.assign(table.rows.size(), std::nullopt);
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& a = table.rows[i - 1];
    const auto& b = table.rows[i];
    if (!a.failure.empty() || !b.failure.empty() || !(b.h < a.h)) continue;
    table.l2_eoc[i] = eoc({a.l2, b.l2}, {a.h, b.h})[0];
    table.linf_eoc[i] = eoc({a.linf, b.linf}, {a.h, b.h})[0];
  }
  return table;
}

std::string ConvergenceTable::to_csv() const {
  std::ostringstream os;
  os << "h,tau,l2_err,l2_eoc,linf_err,linf_eoc,n_elements,n_boundary_elements,cond_estimate\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool ok = r.failure.empty();
    os << (r.h > 0.0 ? fmt(r.h) : "") << ',' << opt(r.tau) << ',' << (ok ? fmt(r.l2) : "") << ',' << opt(l2_eoc[i])
       << ',' << (ok ? fmt(r.linf) : "") << ',' << opt(linf_eoc[i]) << ',' << r.n_elements << ',' << r.n_narrow_band
       << ',' << opt(r.cond) << '\n';
  }
  return os.str();
}

std::string ConvergenceTable::to_text() const {
  std::ostringstream os;
  const bool parabolic = experiment == "parabolic-xy";
  char line[512];
  std::snprintf(line, sizeof line, "%-11s %-11s %-11s %-7s %-11s %-7s %-7s %-7s %-7s %-11s\n", "h",
                parabolic ? "tau" : "", parabolic ? "Linf(L2)" : "L2 error", "EOC", parabolic ? "Linf(Linf)" : "Linf error",
                "EOC", "N_Omega", "N_Gamma", "N_band", parabolic ? "" : "cond");
  os << line;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.failure.empty()) {
      os << "level " << i << " failed: " << r.failure << '\n';
      continue;
    }
    auto e = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string("-"); };
    std::snprintf(line, sizeof line, "%-11s %-11s %-11s %-7s %-11s %-7s %-7d %-7d %-7d %-11s\n", sci(r.h).c_str(),
                  r.tau ? sci(*r.tau).c_str() : "", sci(r.l2).c_str(), e(l2_eoc[i]).c_str(), sci(r.linf).c_str(),
                  e(linf_eoc[i]).c_str(), r.n_elements, r.n_touching, r.n_narrow_band,
                  r.cond ? sci(*r.cond).c_str() : "");
    os << line;
  }
  return os.str();
}

}  // namespace bsvem::analysis
