#include "bsvem/solvers.hpp"

#include "bsvem/error.hpp"

#include <cmath>
#include <fstream>
#include <charconv>

namespace bsvem::solvers {

namespace {

void check_operators(const mesh::BulkSurfaceMesh& mesh, const vem::GlobalOperators& ops) {
  const Index n = mesh.num_nodes(), m = mesh.num_boundary_nodes;
  if (ops.bulk_stiffness.rows() != n || ops.bulk_mass.rows() != n || ops.surface_stiffness.rows() != m ||
      ops.surface_mass.rows() != m)
    throw ShapeError("operators (" + std::to_string(ops.bulk_mass.rows()) + ", " +
                     std::to_string(ops.surface_mass.rows()) + ") do not match the mesh (N = " + std::to_string(n) +
                     ", M = " + std::to_string(m) + ")");
}

// Places an M x M matrix into the leading block of an N x N (or N x M, M x N) matrix.
linalg::SparseMatrix embed(const linalg::SparseMatrix& a, Index rows, Index cols, double c) {
  std::vector<linalg::Triplet> t;
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = a.row_offsets()[r]; k < a.row_offsets()[r + 1]; ++k)
      t.push_back({r, a.col_indices()[k], c * a.values()[k]});
  return linalg::SparseMatrix::from_triplets(rows, cols, std::move(t));
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

linalg::BlockSystem elliptic_block_system(const mesh::BulkSurfaceMesh& mesh, const vem::GlobalOperators& ops,
                                          const EllipticProblem& prob) {
  check_operators(mesh, ops);
  if (!(prob.alpha > 0.0 && prob.beta > 0.0)) throw InvalidArgument("alpha and beta must be positive");
  const Index n = mesh.num_nodes(), m = mesh.num_boundary_nodes;
  linalg::BlockSystem s;
  s.bulk_bulk = linalg::add_scaled(linalg::add_scaled(ops.bulk_stiffness, ops.bulk_mass, 1.0),
                                   embed(ops.surface_mass, n, n, 1.0), prob.alpha);
  s.bulk_surface = embed(ops.surface_mass, n, m, -prob.beta);
  s.surface_bulk = embed(ops.surface_mass, m, n, -prob.alpha);
  s.surface_surface = linalg::add_scaled(ops.surface_stiffness, ops.surface_mass, prob.beta + 1.0);
  s.rhs_bulk = linalg::spmv(ops.bulk_mass, vem::interpolate_bulk(prob.f, mesh));
  s.rhs_surface = linalg::spmv(ops.surface_mass, vem::interpolate_surface(prob.g, mesh));
  return s;
}

DiscreteSolution solve_elliptic(const mesh::BulkSurfaceMesh& mesh, const vem::GlobalOperators& ops,
                                const EllipticProblem& prob, const linalg::SolveOptions& opts) {
  const linalg::BlockSystem s = elliptic_block_system(mesh, ops, prob);
  const Vector x = linalg::solve(linalg::block_assemble(s), linalg::block_rhs(s), opts);
  DiscreteSolution sol;
  sol.bulk = x.head(mesh.num_nodes());
  sol.surface = x.tail(mesh.num_boundary_nodes);
  return sol;
}

KineticsVariant parse_kinetics_variant(std::string_view s) {
  if (s == "plain" || s == "plain-kinetics") return KineticsVariant::Plain;
  if (s == "projected" || s == "projected-kinetics") return KineticsVariant::Projected;
  throw InvalidArgument("kinetics variant must be 'plain' or 'projected', got '" + std::string(s) + "'");
}

std::string_view to_string(KineticsVariant v) { return v == KineticsVariant::Plain ? "plain" : "projected"; }

Index step_count(double T, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (!(T >= 0.0)) throw InvalidArgument("T must be nonnegative");
  // Guard against T / tau landing a rounding error above an integer.
  return static_cast<Index>(std::ceil(T / tau * (1.0 - 1e-12)));
}

ImexStepper::ImexStepper(const mesh::BulkSurfaceMesh& mesh, const vem::GlobalOperators& ops,
                         const ParabolicProblem& prob, const vem::VemOptions& vem_opts)
    : mesh_(mesh), ops_(ops), prob_(prob) {
  check_operators(mesh, ops);
  if (!(prob.du > 0.0 && prob.dv > 0.0)) throw InvalidArgument("diffusivities must be positive");
  if (!(prob.tau >= 0.0)) throw InvalidArgument("tau must be nonnegative");
  bulk_factor_ = std::make_unique<linalg::Factorization>(
      linalg::add_scaled(ops.bulk_mass, ops.bulk_stiffness, prob.tau * prob.du));
  surface_factor_ = std::make_unique<linalg::Factorization>(
      linalg::add_scaled(ops.surface_mass, ops.surface_stiffness, prob.tau * prob.dv));
  if (prob.variant == KineticsVariant::Projected) {
    projected_.reserve(mesh.elements.size());
    for (Index e = 0; e < mesh.num_elements(); ++e) {
      const vem::LocalElementData d = vem::local_projector(mesh.polygon(e), vem_opts, e);
      projected_.push_back({mesh.elements[e], d.pi_nabla, d.pi_nabla_star, vem::monomial_mass(d)});
    }
  }
}

DiscreteSolution ImexStepper::initial_state() const {
  return {vem::interpolate_bulk(prob_.u0, mesh_), vem::interpolate_surface(prob_.v0, mesh_), 0.0};
}

Vector ImexStepper::bulk_reaction(const Vector& xi) const {
  const auto& q = prob_.kinetics.q;
  if (prob_.variant == KineticsVariant::Plain) {
    Vector z(xi.size());
    for (Index i = 0; i < xi.size(); ++i) {
      z[i] = q(xi[i]);
      if (!std::isfinite(z[i])) throw KineticsError("bulk kinetics is not finite at node " + std::to_string(i), i);
    }
    return linalg::spmv(ops_.bulk_mass, z);
  }
  // Element-wise int Pi0(I q(Pi0 U)) Pi0 phi_i.
  Vector out = Vector::Zero(xi.size());
  for (const auto& pe : projected_) {
    const Index n = static_cast<Index>(pe.nodes.size());
    Vector local(n);
    for (Index k = 0; k < n; ++k) local[k] = xi[pe.nodes[k]];
    Vector z = pe.pi_nabla * local;
    for (Index k = 0; k < n; ++k) {
      z[k] = q(z[k]);
      if (!std::isfinite(z[k]))
        throw KineticsError("bulk kinetics is not finite at node " + std::to_string(pe.nodes[k]), pe.nodes[k]);
    }
    const Vector contrib = pe.pi_nabla_star.transpose() * (pe.monomial_mass * (pe.pi_nabla_star * z));
    for (Index k = 0; k < n; ++k) out[pe.nodes[k]] += contrib[k];
  }
  return out;
}

DiscreteSolution ImexStepper::step(const DiscreteSolution& st) const {
  const Index n = mesh_.num_nodes(), m = mesh_.num_boundary_nodes;
  if (st.bulk.size() != n || st.surface.size() != m) throw ShapeError("state does not match the mesh");
  const double tau = prob_.tau;
  Vector flux(m), react(m);
  for (Index k = 0; k < m; ++k) {
    flux[k] = prob_.kinetics.s(st.bulk[k], st.surface[k]);
    react[k] = prob_.kinetics.r(st.bulk[k], st.surface[k]);
    if (!std::isfinite(flux[k]) || !std::isfinite(react[k]))
      throw KineticsError("surface kinetics is not finite at node " + std::to_string(k), k);
  }
  const Vector mflux = linalg::spmv(ops_.surface_mass, flux);

  Vector rb = linalg::spmv(ops_.bulk_mass, st.bulk) + tau * bulk_reaction(st.bulk);
  rb.head(m) += tau * mflux;
  Vector rs = linalg::spmv(ops_.surface_mass, st.surface + tau * react) - tau * mflux;

  DiscreteSolution next;
  next.bulk = bulk_factor_->solve(rb);
  next.surface = surface_factor_->solve(rs);
  next.time = st.time + tau;
  return next;
}

DiscreteSolution solve_parabolic(const mesh::BulkSurfaceMesh& mesh, const vem::GlobalOperators& ops,
                                 const ParabolicProblem& prob, const std::vector<Observer>& observers,
                                 const vem::VemOptions& vem_opts) {
  if (!(prob.tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (!(prob.T >= prob.tau)) throw InvalidArgument("T must be at least tau");
  const Index steps = step_count(prob.T, prob.tau);
  const ImexStepper stepper(mesh, ops, prob, vem_opts);
  DiscreteSolution st = stepper.initial_state();
  for (const auto& ob : observers) ob(0, st);
  for (Index k = 1; k <= steps; ++k) {
    st = stepper.step(st);
    st.time = static_cast<double>(k) * prob.tau;
    for (const auto& ob : observers) ob(k, st);
  }
  return st;
}

double wave_pinning_kinetic(double a, double b, double k0, double gamma) {
  return (k0 + gamma * a * a / (1.0 + a * a)) * b - a;
}

ParabolicProblem wave_pinning_problem(double eps2, double k0, double gamma) {
  if (!(eps2 > 0.0)) throw InvalidArgument("wave pinning: eps^2 must be positive");
  const double eps = std::sqrt(eps2);
  ParabolicProblem p;
  p.du = 1.0 / eps;
  p.dv = eps;
  // u is the cytosolic b in the bulk, v the membrane-bound a on the surface.
  p.kinetics.s = [=](double u, double v) { return -wave_pinning_kinetic(v, u, k0, gamma) / eps; };
  p.u0 = geometry::constant_field(2.487);
  p.v0 = {[](const Point& x, double) {
            const double sgn = x.x() > 0.0 ? 1.0 : (x.x() < 0.0 ? -1.0 : 0.0);
            return 0.309 + 0.35 * (1.0 + sgn) * std::exp(-20.0 * x.y() * x.y());
          },
          geometry::Support::Surface};
  p.T = 4.5;
  p.tau = 2e-3;
  return p;
}

ParabolicProblem parabolic_xy_problem(double tau, double T) {
  const auto fields = geometry::experiment_fields("parabolic-xy", 1.0, 1.0);
  ParabolicProblem p;
  p.du = 1.0;
  p.dv = 0.25;
  p.kinetics.q = [](double u) { return -u; };
  p.kinetics.r = [](double u, double) { return 2.0 * u; };
  p.kinetics.s = [](double, double v) { return 4.0 / 3.0 * v; };
  p.u0 = fields.at("u0");
  p.v0 = fields.at("v0");
  p.T = T;
  p.tau = tau;
  return p;
}

double discrete_mass(const DiscreteSolution& st, const vem::GlobalOperators& ops) {
  return linalg::spmv(ops.bulk_mass, st.bulk).sum() + linalg::spmv(ops.surface_mass, st.surface).sum();
}

void MassRecorder::operator()(Index, const DiscreteSolution& st) {
  SummaryRow r;
  r.t = st.time;
  r.mass = discrete_mass(st, ops_);
  r.bulk_min = st.bulk.minCoeff();
  r.bulk_max = st.bulk.maxCoeff();
  r.surf_min = st.surface.minCoeff();
  r.surf_max = st.surface.maxCoeff();
  rows_.push_back(r);
}

double MassRecorder::max_relative_drift() const {
  if (rows_.empty()) return 0.0;
  const double m0 = rows_.front().mass;
  double worst = 0.0;
  for (const auto& r : rows_) worst = std::max(worst, std::abs(r.mass - m0) / std::abs(m0));
  return worst;
}

void MassRecorder::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "t,mass,bulk_min,bulk_max,surf_min,surf_max\n";
  for (const auto& r : rows_)
    out << fmt(r.t) << ',' << fmt(r.mass) << ',' << fmt(r.bulk_min) << ',' << fmt(r.bulk_max) << ','
        << fmt(r.surf_min) << ',' << fmt(r.surf_max) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_snapshot(const mesh::BulkSurfaceMesh& mesh, const Vector& values, bool surface,
                    const std::filesystem::path& path) {
  const Index n = surface ? mesh.num_boundary_nodes : mesh.num_nodes();
  if (values.size() != n) throw ShapeError("snapshot length does not match the mesh");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "node_index,x,y,value\n";
  for (Index i = 0; i < n; ++i)
    out << i << ',' << fmt(mesh.nodes[i].x()) << ',' << fmt(mesh.nodes[i].y()) << ',' << fmt(values[i]) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace bsvem::solvers
