#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bsvem/analysis.hpp"
#include "bsvem/error.hpp"
#include "bsvem/mesh.hpp"
#include "bsvem/solvers.hpp"
#include "bsvem/vem.hpp"

namespace py = pybind11;
using namespace bsvem;

namespace {

Eigen::MatrixX2d node_array(const mesh::BulkSurfaceMesh& m) {
  Eigen::MatrixX2d out(m.num_nodes(), 2);
  for (Index i = 0; i < m.num_nodes(); ++i) out.row(i) = m.nodes[i].transpose();
  return out;
}

geometry::DomainDescriptor domain_by_name(const std::string& name, double a, double b) {
  if (name == "disc") return geometry::unit_disc();
  if (name == "ellipse") return geometry::ellipse(a, b);
  throw InvalidArgument("domain must be 'disc' or 'ellipse', got '" + name + "'");
}

vem::VemOptions vem_options(const std::string& stab, const std::string& pinabla) {
  return {vem::parse_stab_scaling(stab), vem::parse_pinabla_zero_mode(pinabla)};
}

py::dict record_dict(const analysis::ErrorRecord& r) {
  py::dict d;
  d["h"] = r.h;
  d["tau"] = r.tau ? py::cast(*r.tau) : py::none();
  d["l2_bulk"] = r.l2_bulk;
  d["l2_surface"] = r.l2_surface;
  d["linf_bulk"] = r.linf_bulk;
  d["linf_surface"] = r.linf_surface;
  d["l2"] = r.l2;
  d["linf"] = r.linf;
  d["cond"] = r.cond ? py::cast(*r.cond) : py::none();
  d["n_nodes"] = r.n_nodes;
  d["n_boundary_nodes"] = r.n_boundary_nodes;
  d["n_elements"] = r.n_elements;
  d["n_boundary_elements"] = r.n_narrow_band;
  d["failure"] = r.failure;
  return d;
}

}  // namespace

PYBIND11_MODULE(_bsvem, m) {
  m.doc() = "Lowest-order bulk-surface virtual element solver";

  auto base = py::register_exception<Error>(m, "BsvemError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<MeshGenerationError>(m, "MeshGenerationError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<mesh::BulkSurfaceMesh>(m, "Mesh")
      .def_property_readonly("nodes", &node_array)
      .def_readonly("num_boundary_nodes", &mesh::BulkSurfaceMesh::num_boundary_nodes)
      .def_readonly("elements", &mesh::BulkSurfaceMesh::elements)
      .def_readonly("boundary_edges", &mesh::BulkSurfaceMesh::boundary_edges)
      .def_readonly("meshsize", &mesh::BulkSurfaceMesh::meshsize)
      .def_readonly("narrow_band_elements", &mesh::BulkSurfaceMesh::narrow_band_elements)
      .def_property_readonly("num_nodes", &mesh::BulkSurfaceMesh::num_nodes)
      .def_property_readonly("num_elements", &mesh::BulkSurfaceMesh::num_elements)
      .def("save", [](const mesh::BulkSurfaceMesh& self, const std::filesystem::path& p) { mesh::save_mesh(self, p); })
      .def("__eq__", [](const mesh::BulkSurfaceMesh& a, const mesh::BulkSurfaceMesh& b) { return a == b; })
      .def("__repr__", [](const mesh::BulkSurfaceMesh& self) {
        return "<Mesh N=" + std::to_string(self.num_nodes()) + " M=" + std::to_string(self.num_boundary_nodes) +
               " elements=" + std::to_string(self.num_elements()) + ">";
      });

  m.def("load_mesh", &mesh::load_mesh, py::arg("path"));
  m.def("build_mesh", &mesh::build_mesh, py::arg("nodes"), py::arg("elements"));
  m.def(
      "generate_cartesian_cut",
      [](double h, double eps, const std::string& domain, double a, double b) {
        return mesh::generate_cartesian_cut(domain_by_name(domain, a, b), h, eps);
      },
      py::arg("h"), py::arg("eps") = 0.1, py::arg("domain") = "disc", py::arg("a") = 1.5, py::arg("b") = 1.0);
  m.def("structured_disc_triangulation", &mesh::structured_disc_triangulation, py::arg("rings"));
  m.def(
      "validate_mesh",
      [](const mesh::BulkSurfaceMesh& mesh, double gamma1, double gamma2, const std::string& domain) {
        const auto q = mesh::validate_mesh(mesh, domain_by_name(domain, 1.5, 1.0), gamma1, gamma2);
        py::dict d;
        d["passed"] = q.passed;
        d["min_star_ratio"] = q.min_star_ratio;
        d["min_spread_ratio"] = q.min_spread_ratio;
        py::list v;
        for (const auto& x : q.violations) v.append(py::make_tuple(x.check, x.element, x.detail));
        d["violations"] = v;
        return d;
      },
      py::arg("mesh"), py::arg("gamma1") = 0.05, py::arg("gamma2") = 0.05, py::arg("domain") = "disc");

  m.def(
      "local_projector",
      [](const Eigen::MatrixX2d& vertices, const std::string& stab, const std::string& pinabla) {
        Polygon poly;
        for (Index i = 0; i < vertices.rows(); ++i) poly.emplace_back(vertices(i, 0), vertices(i, 1));
        const auto opts = vem_options(stab, pinabla);
        const auto data = vem::local_projector(poly, opts);
        py::dict d;
        d["D"] = data.D;
        d["B"] = data.B;
        d["G"] = DenseMatrix(data.G);
        d["pi_nabla_star"] = data.pi_nabla_star;
        d["pi_nabla"] = data.pi_nabla;
        d["stiffness"] = vem::local_stiffness(data, opts);
        d["mass"] = vem::local_mass(data, opts);
        d["h_E"] = data.h_E;
        d["area"] = data.area;
        return d;
      },
      py::arg("vertices"), py::arg("stab_scaling") = "paper", py::arg("pinabla_zero") = "edge");

  m.def(
      "assemble",
      [](const mesh::BulkSurfaceMesh& mesh, const std::string& stab, const std::string& pinabla, int threads) {
        vem::AssemblyOptions o;
        o.vem = vem_options(stab, pinabla);
        o.threads = threads;
        const auto ops = vem::assemble(mesh, o);
        py::dict d;
        d["bulk_stiffness"] = ops.bulk_stiffness.to_eigen();
        d["bulk_mass"] = ops.bulk_mass.to_eigen();
        d["surface_stiffness"] = ops.surface_stiffness.to_eigen();
        d["surface_mass"] = ops.surface_mass.to_eigen();
        return d;
      },
      py::arg("mesh"), py::arg("stab_scaling") = "paper", py::arg("pinabla_zero") = "edge", py::arg("threads") = 1);

  m.def(
      "solve_elliptic",
      [](const mesh::BulkSurfaceMesh& mesh, const std::string& preset, double alpha, double beta, double c1) {
        geometry::FieldSet f;
        if (preset == "constant") {
          f["f"] = geometry::constant_field(c1);
          f["g"] = geometry::constant_field(alpha * c1 / beta, geometry::Support::Surface);
        } else {
          f = geometry::experiment_fields(preset, alpha, beta);
        }
        const auto ops = vem::assemble(mesh);
        const auto sol = solvers::solve_elliptic(mesh, ops, {alpha, beta, f.at("f"), f.at("g")});
        return py::make_tuple(sol.bulk, sol.surface);
      },
      py::arg("mesh"), py::arg("preset") = "elliptic-xy", py::arg("alpha") = 1.0, py::arg("beta") = 2.0,
      py::arg("c1") = 2.0);

  m.def(
      "solve_parabolic",
      [](const mesh::BulkSurfaceMesh& mesh, const std::string& preset, std::optional<double> T,
         std::optional<double> tau, const std::string& variant) {
        solvers::ParabolicProblem prob;
        if (preset == "wavepin")
          prob = solvers::wave_pinning_problem();
        else if (preset == "parabolic-xy")
          prob = solvers::parabolic_xy_problem(1e-3);
        else
          throw InvalidArgument("preset must be 'wavepin' or 'parabolic-xy', got '" + preset + "'");
        if (T) prob.T = *T;
        if (tau) prob.tau = *tau;
        prob.variant = solvers::parse_kinetics_variant(variant);
        const auto ops = vem::assemble(mesh);
        solvers::MassRecorder rec(ops);
        const auto sol = solvers::solve_parabolic(mesh, ops, prob, {rec.observer()});
        std::vector<double> t, mass;
        for (const auto& r : rec.rows()) {
          t.push_back(r.t);
          mass.push_back(r.mass);
        }
        py::dict d;
        d["bulk"] = sol.bulk;
        d["surface"] = sol.surface;
        d["time"] = sol.time;
        d["t"] = t;
        d["mass"] = mass;
        return d;
      },
      py::arg("mesh"), py::arg("preset") = "wavepin", py::arg("T") = py::none(), py::arg("tau") = py::none(),
      py::arg("kinetics_variant") = "plain");

  m.def(
      "convergence_study",
      [](const std::string& experiment, const std::string& family, int levels, double tau0, double T, bool condition) {
        analysis::StudyConfig cfg;
        cfg.experiment = experiment;
        cfg.family = analysis::parse_mesh_family(family);
        cfg.levels = levels;
        cfg.tau0 = tau0;
        cfg.T = T;
        cfg.condition = condition;
        const auto table = analysis::run_convergence_study(cfg);
        py::list rows;
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
          auto d = record_dict(table.rows[i]);
          d["l2_eoc"] = table.l2_eoc[i] ? py::cast(*table.l2_eoc[i]) : py::none();
          d["linf_eoc"] = table.linf_eoc[i] ? py::cast(*table.linf_eoc[i]) : py::none();
          rows.append(d);
        }
        return rows;
      },
      py::arg("experiment") = "elliptic-xy", py::arg("family") = "cartesian", py::arg("levels") = 3,
      py::arg("tau0") = 1e-3, py::arg("T") = 1.0, py::arg("condition") = false);

  m.def("eoc", &analysis::eoc, py::arg("errors"), py::arg("hs"));
}
