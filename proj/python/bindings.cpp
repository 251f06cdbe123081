#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "tracelab/band1d.hpp"
#include "tracelab/closedform.hpp"
#include "tracelab/fem.hpp"
#include "tracelab/profile.hpp"
#include "tracelab/records.hpp"
#include "tracelab/verify.hpp"

namespace py = pybind11;
using namespace tracelab;

namespace {

int default_nodes(const EigenmodeRecord& r) {
  int top = 0;
  for (int i : r.indices) top = std::max(top, std::abs(i));
  return 8 * top + 256;
}

std::string record_line(const EigenmodeRecord& r, const std::string& command) {
  return records::to_line(records::make_run_record(command, r));
}

}  // namespace

PYBIND11_MODULE(_tracelab, m) {
  m.doc() = "Boundary trace norms of Laplace eigenfunctions";
  m.attr("SCHEMA_VERSION") = records::kSchemaVersion;

  py::class_<EigenmodeRecord>(m, "EigenmodeRecord")
      .def_property_readonly("domain", [](const EigenmodeRecord& r) { return records::domain_to_json(r.domain); })
      .def_property_readonly("domain_kind", [](const EigenmodeRecord& r) { return domain_kind(r.domain); })
      .def_readonly("indices", &EigenmodeRecord::indices)
      .def_readonly("eigenvalue", &EigenmodeRecord::lambda)
      .def_readonly("psi_norm_sq", &EigenmodeRecord::psi_norm_sq)
      .def_readonly("ratio", &EigenmodeRecord::ratio)
      .def_property_readonly("provenance", [](const EigenmodeRecord& r) { return std::string(to_string(r.provenance)); })
      .def("to_json", &record_line, py::arg("command") = "python", "One JSON-lines run record")
      .def("__repr__", [](const EigenmodeRecord& r) {
        std::ostringstream s;
        s << "<EigenmodeRecord " << domain_kind(r.domain) << " lambda=" << r.lambda << " ratio=" << r.ratio << ">";
        return s.str();
      });

  m.def("disc_mode", &closedform::disc_mode, py::arg("a"), py::arg("n"), py::arg("k"));
  m.def("rectangle_mode", &closedform::rectangle_mode, py::arg("a"), py::arg("b"), py::arg("m"), py::arg("n"));
  m.def("cylinder_mode", &closedform::cylinder_mode, py::arg("a"), py::arg("b"), py::arg("m"), py::arg("n"));
  m.def("hemisphere_mode", &closedform::hemisphere_mode, py::arg("l"));
  m.def("neumann_disc_mode", &closedform::neumann_disc_mode, py::arg("n"), py::arg("k"));

  m.def(
      "trace_norm",
      [](const EigenmodeRecord& r, int nodes) {
        return verify::quad_trace_norm(closedform::trace_for(r, nodes > 0 ? nodes : default_nodes(r)));
      },
      py::arg("record"), py::arg("nodes") = 0, "||psi||^2 by quadrature of the exact trace");
  m.def(
      "rellich_residual",
      [](const EigenmodeRecord& r, int nodes) {
        return verify::rellich_check(r, closedform::trace_for(r, nodes > 0 ? nodes : default_nodes(r))).residual;
      },
      py::arg("record"), py::arg("nodes") = 0);
  m.def("scaled_sobolev_norm", &verify::scaled_sobolev_norm, py::arg("record"), py::arg("k"));
  m.def(
      "ozawa_rectangle",
      [](double a, double b, double lambda_max, double x, double y) {
        const auto r = verify::ozawa_sum(make_rectangle(a, b), lambda_max, {x, y});
        return py::dict(py::arg("empirical") = r.empirical, py::arg("leading_term") = r.leading_term,
                        py::arg("mode_count") = r.mode_count, py::arg("weyl_count") = r.weyl_count);
      },
      py::arg("a"), py::arg("b"), py::arg("lambda_max"), py::arg("x"), py::arg("y"));
  m.def(
      "neumann_identity",
      [](int n, int k) {
        const auto r = verify::neumann_identity(n, k);
        return py::dict(py::arg("eigenvalue") = r.lambda, py::arg("boundary_norm_sq") = r.boundary_norm_sq,
                        py::arg("residual") = r.residual);
      },
      py::arg("n"), py::arg("k"));

  m.def(
      "band_scaling",
      [](const std::string& curvature, double half_width, std::vector<int> l_values, int grid) {
        const auto r = band1d::trapping_scaling_audit(curvature_from_string(curvature), half_width, l_values, grid);
        std::vector<double> lam, psi;
        for (const auto& row : r.rows) {
          lam.push_back(row.lambda);
          psi.push_back(row.psi_norm_sq);
        }
        return py::dict(py::arg("l") = l_values, py::arg("eigenvalue") = lam, py::arg("psi_norm_sq") = psi,
                        py::arg("slope") = r.slope, py::arg("correlation") = r.correlation,
                        py::arg("top_decade_ratio") = r.top_decade_ratio, py::arg("lambda_decades") = r.lambda_decades);
      },
      py::arg("curvature"), py::arg("half_width"), py::arg("l_values"), py::arg("grid") = 1024);

  m.def(
      "collar_profile",
      [](const EigenmodeRecord& r, double delta, int points) {
        const auto p = profile::collar_profile(r, profile::collar_grid(delta, points));
        return py::dict(py::arg("r") = p.r_grid, py::arg("E") = p.E_values, py::arg("L") = p.L_values,
                        py::arg("psi_norm_sq") = p.psi_norm_sq, py::arg("collar_mass") = profile::collar_mass(p));
      },
      py::arg("record"), py::arg("delta"), py::arg("points") = 512);

  m.def(
      "fem_eigs",
      [](const std::vector<std::pair<double, double>>& polygon, double h, int count, std::uint64_t seed) {
        std::vector<Point2> poly;
        for (auto [x, y] : polygon) poly.push_back({x, y});
        const auto system = fem::assemble(fem::mesh_polygon(poly, h));
        fem::SolveOptions opts;
        opts.seed = seed;
        auto pairs = fem::solve_eigs(system, count, 0.0, opts);
        py::list out;
        for (auto& p : pairs) {
          const double psi = verify::quad_trace_norm(fem::recover_flux(system, p));
          out.append(py::dict(py::arg("eigenvalue") = p.lambda_h, py::arg("psi_norm_sq") = psi,
                              py::arg("residual") = p.residual, py::arg("h") = p.h));
        }
        return out;
      },
      py::arg("polygon"), py::arg("h"), py::arg("count") = 5, py::arg("seed") = 1,
      "Dirichlet eigenpairs of a polygon by linear finite elements");

  m.def(
      "roundtrip_line",
      [](const std::string& line) { return records::to_line(records::from_line(line)); },
      py::arg("line"), "Parse and re-serialise one record line");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line driver in process: (exit code, stdout, stderr)");
}
