#include "bsvem/cli.hpp"

#include "bsvem/analysis.hpp"
#include "bsvem/error.hpp"
#include "bsvem/mesh.hpp"
#include "bsvem/solvers.hpp"
#include "bsvem/vem.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace bsvem::cli {

namespace fs = std::filesystem;

namespace {

class ValidationFailure : public Error {
 public:
  using Error::Error;
};

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Bound option values plus the ability to echo them in `key = value` form.
class Registry {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& var, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + name, var, help);
    echo_.emplace_back(name, [&var] { return render(var); });
    opts_[name] = opt;
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& name, bool& var, const std::string& help) {
    CLI::Option* opt = app->add_flag("--" + name, var, help);
    echo_.emplace_back(name, [&var] { return std::string(var ? "true" : "false"); });
    opts_[name] = opt;
    return opt;
  }

  bool given(const std::string& name) const {
    auto it = opts_.find(name);
    return it != opts_.end() && it->second->count() > 0;
  }

  std::string echo() const {
    std::string out;
    for (const auto& [k, f] : echo_) out += k + " = " + f() + "\n";
    return out;
  }

 private:
  static std::string render(double v) { return fmt(v); }
  static std::string render(int v) { return std::to_string(v); }
  static std::string render(const std::string& v) { return v; }

  std::vector<std::pair<std::string, std::function<std::string()>>> echo_;
  std::map<std::string, CLI::Option*> opts_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

// Reads `key = value` lines ('#' comments) into --key=value tokens.
std::vector<std::string> config_tokens(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::vector<std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line.substr(0, line.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value' in config file", lineno);
    const std::string key = trim(s.substr(0, eq));
    if (key == "config") continue;
    out.push_back("--" + key + "=" + trim(s.substr(eq + 1)));
  }
  return out;
}

struct Common {
  std::string config;
  bool deterministic = false;
  std::string stab_scaling = "paper";
  std::string pinabla_zero = "edge";
  std::string domain = "disc";
  double ellipse_a = 1.5;
  double ellipse_b = 1.0;

  int threads() const { return deterministic ? 1 : 0; }
  vem::VemOptions vem() const {
    return {vem::parse_stab_scaling(stab_scaling), vem::parse_pinabla_zero_mode(pinabla_zero)};
  }
  geometry::DomainDescriptor make_domain() const {
    if (domain == "disc") return geometry::unit_disc();
    if (domain == "ellipse") return geometry::ellipse(ellipse_a, ellipse_b);
    throw InvalidArgument("domain must be 'disc' or 'ellipse', got '" + domain + "'");
  }
};

void add_common(Registry& reg, CLI::App* app, Common& c, bool geometry_flags) {
  app->add_option("--config", c.config, "Read 'key = value' defaults from a file (flags given explicitly win)");
  reg.flag(app, "deterministic", c.deterministic, "Single-threaded assembly for bit-exact reruns");
  reg.add(app, "stab-scaling", c.stab_scaling, "Stabilization scaling: paper | classic");
  reg.add(app, "pinabla-zero", c.pinabla_zero, "Constant part of the projector: edge | vertex");
  if (geometry_flags) {
    reg.add(app, "domain", c.domain, "Domain: disc | ellipse");
    reg.add(app, "ellipse-a", c.ellipse_a, "Ellipse semi-axis along x");
    reg.add(app, "ellipse-b", c.ellipse_b, "Ellipse semi-axis along y");
  }
}

vem::GlobalOperators assemble_ops(const mesh::BulkSurfaceMesh& m, const Common& c) {
  vem::AssemblyOptions o;
  o.vem = c.vem();
  o.threads = c.threads();
  return vem::assemble(m, o);
}

// ---- mesh ------------------------------------------------------------------

struct MeshArgs {
  Common common;
  double h = 0.1;
  double eps = 0.1;
  double gamma1 = 0.05;
  double gamma2 = 0.05;
  std::string out = "mesh.bsm";
};

int cmd_mesh(const MeshArgs& a, const Registry& reg, std::ostream& out, std::ostream& err) {
  if (!(a.eps > 0.0 && a.eps < 0.5)) throw InvalidArgument("--eps must lie in (0, 1/2), got " + fmt(a.eps));
  if (!(a.h > 0.0)) throw InvalidArgument("--h must be positive, got " + fmt(a.h));
  const auto domain = a.common.make_domain();
  mesh::GenerationReport rep;
  const auto m = mesh::generate_cartesian_cut(domain, a.h, a.eps, &rep);
  const auto q = mesh::validate_mesh(m, domain, a.gamma1, a.gamma2);
  out << "N = " << m.num_nodes() << "\nM = " << m.num_boundary_nodes << "\nelements = " << m.num_elements()
      << "\nboundary elements = " << m.narrow_band_elements.size()
      << "\nboundary-touching elements = " << mesh::count_boundary_touching_elements(m) << "\nh = " << fmt(m.meshsize)
      << "\nmin star ratio = " << fmt(q.min_star_ratio) << "\nmin spread ratio = " << fmt(q.min_spread_ratio)
      << "\nmerged nodes = " << rep.merged_nodes << "\ncollapsed elements = " << rep.collapsed_elements << "\n";
  if (!q.passed) {
    for (std::size_t k = 0; k < q.violations.size() && k < 20; ++k)
      err << q.violations[k].check << " element " << q.violations[k].element << ": " << q.violations[k].detail << "\n";
    throw ValidationFailure("generated mesh fails validation (" + std::to_string(q.violations.size()) + " violations)");
  }
  const fs::path path(a.out);
  if (path.has_parent_path()) make_dir(path.parent_path());
  mesh::save_mesh(m, path);
  write_text(fs::path(a.out + ".config.echo"), reg.echo());
  return 0;
}

// ---- solve-elliptic --------------------------------------------------------

struct EllipticArgs {
  Common common;
  std::string mesh;
  std::string preset = "elliptic-xy";
  double alpha = 1.0;
  double beta = 2.0;
  double c1 = 2.0;
  std::string norm = "quadrature";
  std::string out = "out";
};

std::string error_lines(double l2b, double l2s, double lib, double lis) {
  std::ostringstream os;
  os << "l2_bulk = " << fmt(l2b) << "\nl2_surface = " << fmt(l2s) << "\nl2 = " << fmt(std::hypot(l2b, l2s))
     << "\nlinf_bulk = " << fmt(lib) << "\nlinf_surface = " << fmt(lis) << "\nlinf = " << fmt(std::max(lib, lis))
     << "\n";
  return os.str();
}

int cmd_solve_elliptic(const EllipticArgs& a, const Registry& reg, std::ostream& out) {
  if (!(a.alpha > 0.0 && a.beta > 0.0)) throw InvalidArgument("--alpha and --beta must be positive");
  const auto norm = analysis::parse_error_norm(a.norm);
  const auto domain = a.common.make_domain();
  geometry::FieldSet fields;
  if (a.preset == "elliptic-xy") {
    fields = geometry::experiment_fields("elliptic-xy", a.alpha, a.beta);
  } else if (a.preset == "constant") {
    const double c2 = a.alpha * a.c1 / a.beta;
    fields["u"] = fields["f"] = geometry::constant_field(a.c1);
    fields["v"] = fields["g"] = geometry::constant_field(c2, geometry::Support::Surface);
  } else {
    throw InvalidArgument("--preset must be 'elliptic-xy' or 'constant', got '" + a.preset + "'");
  }
  if (a.mesh.empty()) throw InvalidArgument("--mesh is required");
  const auto m = mesh::load_mesh(a.mesh);
  const auto ops = assemble_ops(m, a.common);
  const solvers::EllipticProblem prob{a.alpha, a.beta, fields.at("f"), fields.at("g")};
  const auto sol = solvers::solve_elliptic(m, ops, prob);

  const auto& u = fields.at("u");
  const auto& v = fields.at("v");
  double l2b, l2s;
  if (norm == analysis::ErrorNorm::Quadrature) {
    l2b = analysis::BulkErrorEvaluator(m, a.common.vem()).l2(sol.bulk, u);
    l2s = analysis::SurfaceErrorEvaluator(m, domain).l2(sol.surface, v);
  } else {
    l2b = analysis::mass_norm_error(sol.bulk, ops.bulk_mass, vem::interpolate_bulk(u, m));
    l2s = analysis::mass_norm_error(sol.surface, ops.surface_mass, vem::interpolate_surface(v, m));
  }
  const double lib = analysis::linf_error(sol.bulk, m, u, 0.0, analysis::Where::Bulk);
  const double lis = analysis::linf_error(sol.surface, m, v, 0.0, analysis::Where::Surface);
  const std::string errs = error_lines(l2b, l2s, lib, lis);

  const fs::path dir(a.out);
  make_dir(dir);
  solvers::write_snapshot(m, sol.bulk, false, dir / "bulk.csv");
  solvers::write_snapshot(m, sol.surface, true, dir / "surface.csv");
  write_text(dir / "errors.txt", errs);
  write_text(dir / "config.echo", reg.echo());
  out << errs;
  return 0;
}

// ---- solve-parabolic -------------------------------------------------------

struct ParabolicArgs {
  Common common;
  std::string mesh;
  double h = 0.0;
  double eps = 0.1;
  std::string preset = "wavepin";
  double eps2 = 1e-3;
  double k0 = 0.05;
  double gamma = 0.79;
  double T = 0.0;
  double tau = 0.0;
  double du = 0.0;
  double dv = 0.0;
  int snap_every = 0;
  std::string variant = "plain";
  std::string norm = "quadrature";
  std::string out = "out";
};

int cmd_solve_parabolic(ParabolicArgs& a, const Registry& reg, std::ostream& out) {
  solvers::ParabolicProblem prob;
  const bool wavepin = a.preset == "wavepin";
  if (wavepin) {
    prob = solvers::wave_pinning_problem(a.eps2, a.k0, a.gamma);
  } else if (a.preset == "parabolic-xy") {
    prob = solvers::parabolic_xy_problem(1e-3, 1.0);
  } else {
    throw InvalidArgument("--preset must be 'wavepin' or 'parabolic-xy', got '" + a.preset + "'");
  }
  if (reg.given("T")) prob.T = a.T;
  if (reg.given("tau")) prob.tau = a.tau;
  if (reg.given("du")) prob.du = a.du;
  if (reg.given("dv")) prob.dv = a.dv;
  a.T = prob.T;
  a.tau = prob.tau;
  a.du = prob.du;
  a.dv = prob.dv;
  if (!(prob.tau > 0.0)) throw InvalidArgument("--tau must be positive, got " + fmt(prob.tau));
  if (!(prob.T >= prob.tau)) throw InvalidArgument("--T must be at least tau");
  if (!(prob.du > 0.0 && prob.dv > 0.0)) throw InvalidArgument("--du and --dv must be positive");
  if (a.snap_every < 0) throw InvalidArgument("--snap-every must be nonnegative");
  prob.variant = solvers::parse_kinetics_variant(a.variant);
  const auto norm = analysis::parse_error_norm(a.norm);
  const auto domain = a.common.make_domain();

  mesh::BulkSurfaceMesh m;
  if (!a.mesh.empty()) {
    m = mesh::load_mesh(a.mesh);
  } else if (a.h > 0.0) {
    if (!(a.eps > 0.0 && a.eps < 0.5)) throw InvalidArgument("--eps must lie in (0, 1/2)");
    m = mesh::generate_cartesian_cut(domain, a.h, a.eps);
  } else {
    throw InvalidArgument("either --mesh or a positive --h is required");
  }
  const auto ops = assemble_ops(m, a.common);

  const fs::path dir(a.out);
  make_dir(dir);
  if (a.snap_every > 0) make_dir(dir / "snapshots");
  solvers::MassRecorder mass(ops);
  std::vector<solvers::Observer> observers{mass.observer()};
  if (a.snap_every > 0)
    observers.push_back([&](Index k, const solvers::DiscreteSolution& s) {
      if (k % a.snap_every != 0) return;
      char name[64];
      std::snprintf(name, sizeof name, "bulk_%07d.csv", static_cast<int>(k));
      solvers::write_snapshot(m, s.bulk, false, dir / "snapshots" / name);
      std::snprintf(name, sizeof name, "surface_%07d.csv", static_cast<int>(k));
      solvers::write_snapshot(m, s.surface, true, dir / "snapshots" / name);
    });
  double l2b = 0, l2s = 0, lib = 0, lis = 0, l2 = 0;
  std::optional<analysis::BulkErrorEvaluator> bulk_eval;
  std::optional<analysis::SurfaceErrorEvaluator> surf_eval;
  geometry::FieldSet fields;
  if (!wavepin) {
    fields = geometry::experiment_fields("parabolic-xy", 1.0, 1.0);
    if (norm == analysis::ErrorNorm::Quadrature) {
      bulk_eval.emplace(m, a.common.vem());
      surf_eval.emplace(m, domain);
    }
    observers.push_back([&](Index, const solvers::DiscreteSolution& s) {
      const auto& u = fields.at("u");
      const auto& v = fields.at("v");
      double b, c;
      if (bulk_eval) {
        b = bulk_eval->l2(s.bulk, u, s.time);
        c = surf_eval->l2(s.surface, v, s.time);
      } else {
        b = analysis::mass_norm_error(s.bulk, ops.bulk_mass, vem::interpolate_bulk(u, m, s.time));
        c = analysis::mass_norm_error(s.surface, ops.surface_mass, vem::interpolate_surface(v, m, s.time));
      }
      l2b = std::max(l2b, b);
      l2s = std::max(l2s, c);
      l2 = std::max(l2, std::hypot(b, c));
      lib = std::max(lib, analysis::linf_error(s.bulk, m, u, s.time, analysis::Where::Bulk));
      lis = std::max(lis, analysis::linf_error(s.surface, m, v, s.time, analysis::Where::Surface));
    });
  }
  const auto final_state = solvers::solve_parabolic(m, ops, prob, observers, a.common.vem());
  mass.write_csv(dir / "summary.csv");

  std::ostringstream report;
  report << "steps = " << solvers::step_count(prob.T, prob.tau) << "\nfinal time = " << fmt(final_state.time)
         << "\nmass drift = " << fmt(mass.max_relative_drift()) << "\nbulk range = [" << fmt(final_state.bulk.minCoeff())
         << ", " << fmt(final_state.bulk.maxCoeff()) << "]\nsurface range = [" << fmt(final_state.surface.minCoeff())
         << ", " << fmt(final_state.surface.maxCoeff()) << "]\n";
  if (!wavepin) {
    const std::string errs = "linf_l2 = " + fmt(l2) + "\nlinf_l2_bulk = " + fmt(l2b) + "\nlinf_l2_surface = " +
                             fmt(l2s) + "\nlinf_linf = " + fmt(std::max(lib, lis)) + "\n";
    write_text(dir / "errors.txt", errs);
    report << errs;
  }
  write_text(dir / "config.echo", reg.echo());
  out << report.str();
  return 0;
}

// ---- convergence -----------------------------------------------------------

struct ConvergenceArgs {
  Common common;
  std::string experiment = "elliptic-xy";
  std::string family = "cartesian";
  int levels = 5;
  double base_h = 0.5;
  double eps = 0.1;
  double alpha = 1.0;
  double beta = 2.0;
  double tau0 = 1e-3;
  double T = 1.0;
  std::string variant = "plain";
  std::string norm = "quadrature";
  bool no_cond = false;
  std::string out;
};

int cmd_convergence(const ConvergenceArgs& a, const Registry& reg, std::ostream& out, std::ostream& err) {
  analysis::StudyConfig cfg;
  cfg.experiment = a.experiment;
  cfg.family = analysis::parse_mesh_family(a.family);
  cfg.levels = a.levels;
  cfg.base_spacing = a.base_h;
  cfg.eps = a.eps;
  cfg.alpha = a.alpha;
  cfg.beta = a.beta;
  cfg.tau0 = a.tau0;
  cfg.T = a.T;
  cfg.vem = a.common.vem();
  cfg.variant = solvers::parse_kinetics_variant(a.variant);
  cfg.norm = analysis::parse_error_norm(a.norm);
  cfg.condition = !a.no_cond;
  cfg.threads = a.common.threads();
  if (!(cfg.base_spacing > 0.0)) throw InvalidArgument("--base-h must be positive");
  if (!(cfg.eps > 0.0 && cfg.eps < 0.5)) throw InvalidArgument("--eps must lie in (0, 1/2)");
  if (!(cfg.alpha > 0.0 && cfg.beta > 0.0)) throw InvalidArgument("--alpha and --beta must be positive");
  if (!(cfg.tau0 > 0.0)) throw InvalidArgument("--tau0 must be positive");
  const auto table = analysis::run_convergence_study(cfg);
  out << table.to_text();
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    make_dir(dir);
    write_text(dir / "convergence.csv", table.to_csv());
    write_text(dir / "config.echo", reg.echo());
  }
  bool failed = false;
  for (const auto& r : table.rows) failed = failed || !r.failure.empty();
  if (failed) err << "some levels failed; see the table above\n";
  return failed ? 1 : 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bulk-surface virtual element solver"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Registry mesh_reg, ell_reg, par_reg, conv_reg;
  MeshArgs ma;
  EllipticArgs ea;
  ParabolicArgs pa;
  ConvergenceArgs ca;

  auto* mesh_cmd = app.add_subcommand("mesh", "Generate a Cartesian cut-cell mesh");
  add_common(mesh_reg, mesh_cmd, ma.common, true);
  mesh_reg.add(mesh_cmd, "h", ma.h, "Background grid spacing");
  mesh_reg.add(mesh_cmd, "eps", ma.eps, "Merge distance (times h) and collapse angle (radians)");
  mesh_reg.add(mesh_cmd, "gamma1", ma.gamma1, "Star-shapedness threshold for validation");
  mesh_reg.add(mesh_cmd, "gamma2", ma.gamma2, "Node spread threshold for validation");
  mesh_reg.add(mesh_cmd, "out", ma.out, "Output mesh file");

  auto* ell_cmd = app.add_subcommand("solve-elliptic", "Solve the coupled elliptic problem");
  add_common(ell_reg, ell_cmd, ea.common, true);
  ell_reg.add(ell_cmd, "mesh", ea.mesh, "Mesh file");
  ell_reg.add(ell_cmd, "preset", ea.preset, "elliptic-xy | constant");
  ell_reg.add(ell_cmd, "alpha", ea.alpha, "Coupling coefficient alpha");
  ell_reg.add(ell_cmd, "beta", ea.beta, "Coupling coefficient beta");
  ell_reg.add(ell_cmd, "c1", ea.c1, "Bulk constant for the constant preset");
  ell_reg.add(ell_cmd, "norm", ea.norm, "L2 error norm: quadrature | nodal-mass");
  ell_reg.add(ell_cmd, "out", ea.out, "Output directory");

  auto* par_cmd = app.add_subcommand("solve-parabolic", "Run the IMEX Euler time loop");
  add_common(par_reg, par_cmd, pa.common, true);
  par_reg.add(par_cmd, "mesh", pa.mesh, "Mesh file");
  par_reg.add(par_cmd, "h", pa.h, "Generate a cut-cell mesh with this spacing instead of --mesh");
  par_reg.add(par_cmd, "eps", pa.eps, "Generator eps when --h is used");
  par_reg.add(par_cmd, "preset", pa.preset, "wavepin | parabolic-xy");
  par_reg.add(par_cmd, "eps2", pa.eps2, "Wave pinning eps^2");
  par_reg.add(par_cmd, "k0", pa.k0, "Wave pinning k0");
  par_reg.add(par_cmd, "gamma", pa.gamma, "Wave pinning gamma");
  par_reg.add(par_cmd, "T", pa.T, "Final time (preset default when omitted)");
  par_reg.add(par_cmd, "tau", pa.tau, "Time step (preset default when omitted)");
  par_reg.add(par_cmd, "du", pa.du, "Bulk diffusivity (preset default when omitted)");
  par_reg.add(par_cmd, "dv", pa.dv, "Surface diffusivity (preset default when omitted)");
  par_reg.add(par_cmd, "snap-every", pa.snap_every, "Write snapshots every k steps (0 = never)");
  par_reg.add(par_cmd, "kinetics-variant", pa.variant, "plain | projected");
  par_reg.add(par_cmd, "norm", pa.norm, "L2 error norm: quadrature | nodal-mass");
  par_reg.add(par_cmd, "out", pa.out, "Output directory");

  auto* conv_cmd = app.add_subcommand("convergence", "Run a refinement study");
  add_common(conv_reg, conv_cmd, ca.common, false);
  conv_reg.add(conv_cmd, "experiment", ca.experiment, "elliptic-xy | parabolic-xy");
  conv_reg.add(conv_cmd, "family", ca.family, "cartesian | triangles");
  conv_reg.add(conv_cmd, "levels", ca.levels, "Number of refinement levels");
  conv_reg.add(conv_cmd, "base-h", ca.base_h, "Grid spacing of the coarsest cut-cell mesh");
  conv_reg.add(conv_cmd, "eps", ca.eps, "Generator eps");
  conv_reg.add(conv_cmd, "alpha", ca.alpha, "Coupling coefficient alpha");
  conv_reg.add(conv_cmd, "beta", ca.beta, "Coupling coefficient beta");
  conv_reg.add(conv_cmd, "tau0", ca.tau0, "Coarsest time step; tau_i = tau0 * 4^-i");
  conv_reg.add(conv_cmd, "T", ca.T, "Final time for parabolic studies");
  conv_reg.add(conv_cmd, "kinetics-variant", ca.variant, "plain | projected");
  conv_reg.add(conv_cmd, "norm", ca.norm, "L2 error norm: quadrature | nodal-mass");
  conv_reg.flag(conv_cmd, "no-cond", ca.no_cond, "Skip condition number estimates");
  conv_reg.add(conv_cmd, "out", ca.out, "Output directory for convergence.csv");

  try {
    // Config-file values go in front of the explicit flags so the latter win.
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      std::size_t erase = 0;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
        erase = 2;
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
        erase = 1;
      }
      if (erase == 0) continue;
      auto tokens = config_tokens(path);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + erase));
      args.insert(args.begin() + 1, tokens.begin(), tokens.end());
      break;
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*mesh_cmd) return cmd_mesh(ma, mesh_reg, out, err);
    if (*ell_cmd) return cmd_solve_elliptic(ea, ell_reg, out);
    if (*par_cmd) return cmd_solve_parabolic(pa, par_reg, out);
    if (*conv_cmd) return cmd_convergence(ca, conv_reg, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const MeshGenerationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientLevels& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NotFound& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationFailure& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace bsvem::cli
