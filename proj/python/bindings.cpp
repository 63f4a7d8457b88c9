#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stbddc/fem/fields.hpp"
#include "stbddc/harness/experiment.hpp"
#include "stbddc/harness/properties.hpp"
#include "stbddc/solvers/solvers.hpp"

namespace py = pybind11;
using namespace stbddc;

namespace {

struct Problem {
  SpaceTimeMesh mesh;
  PhysicsConfig physics;
  ScalarField exact;
};

// forcing: a number or "sinusoidal" (manufactured solution, exact error reported)
Problem make_problem(int n, double final_time, int steps, double nu, std::pair<double, double> beta, double sigma,
                     bool supg, const py::object& forcing) {
  Problem p;
  p.mesh = SpaceTimeMesh(1.0, 1.0, n, n, final_time, steps);
  p.physics.nu = nu;
  p.physics.beta_x = beta.first;
  p.physics.beta_y = beta.second;
  p.physics.sigma = sigma;
  p.physics.supg = supg;
  if (py::isinstance<py::str>(forcing)) {
    if (forcing.cast<std::string>() != "sinusoidal") throw py::value_error("forcing must be a number or 'sinusoidal'");
    const ManufacturedSolution ms = sinusoidal_solution(p.physics);
    p.physics.forcing = ms.forcing;
    p.exact = ms.exact;
  } else {
    p.physics.forcing = constant_field(forcing.cast<double>());
  }
  p.physics.validate();
  return p;
}

py::array_t<double> to_array(const Vector& u, const SpaceTimeMesh& mesh) {
  // (steps, ny - 1, nx - 1) view of the interior values
  py::array_t<double> out({mesh.num_steps(), mesh.ny() - 1, mesh.nx() - 1});
  std::copy(u.begin(), u.end(), out.mutable_data());
  return out;
}

py::dict finish(const Problem& p, const Discretization& disc, const Vector& u) {
  py::dict d;
  d["solution"] = to_array(u, p.mesh);
  if (p.exact) {
    const int n = disc.num_interior(), k = disc.num_steps();
    const Vector nodal = disc.nodal_field(k, std::span<const double>(u).subspan(static_cast<std::size_t>(k - 1) * n, n));
    d["l2_error"] = l2_error(p.mesh, nodal, p.exact, p.mesh.final_time());
  } else {
    d["l2_error"] = py::none();
  }
  return d;
}

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["alpha"] = r.alpha;
  d["px"] = r.px;
  d["py"] = r.py;
  d["pt"] = r.pt;
  d["subdomains"] = r.subdomains;
  d["H_over_h"] = r.cells_per_subdomain;
  d["K_n"] = r.steps_per_slab;
  d["cfl_beta"] = r.cfl_beta;
  d["cfl_nu"] = r.cfl_nu;
  d["peclet"] = r.peclet;
  d["linear_iterations"] = r.linear_iterations;
  d["picard_iterations"] = r.picard_iterations;
  d["local_solves"] = r.local_solves;
  d["setup_seconds"] = r.setup_seconds;
  d["solve_seconds"] = r.solve_seconds;
  d["l2_error_T"] = r.l2_error ? py::cast(*r.l2_error) : py::none();
  d["converged"] = r.converged;
  d["nu"] = r.nu;
  d["message"] = r.message;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Space-time BDDC laboratory";

  static py::exception<Error> error(m, "StbddcError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kInvalidArgument ||
          e.code() == ErrorCode::kInvalidPartition) {
        PyErr_SetString(PyExc_ValueError, e.what());
      } else {
        py::set_error(error, e.what());
      }
    }
  });

  m.def("csv_header", &csv_header, "Fixed CSV header of run_experiment output.");

  m.def(
      "resolve_config", [](const std::string& text) { return config_to_json(parse_config(text)); }, py::arg("text"),
      "Parse a JSON config and return it with every default filled in.");

  m.def(
      "run_experiment",
      [](const std::string& text) {
        const ExperimentConfig c = parse_config(text);
        std::vector<ResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_experiment(c);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("config_json"), "Run the sweep of a JSON config; one dict per sweep point.");

  m.def(
      "verify_suite",
      [](unsigned seed) {
        py::list out;
        for (const auto& r : verify_suite(seed)) {
          py::dict d;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["detail"] = r.detail;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 1u);

  m.def(
      "solve_spacetime",
      [](int n, double final_time, int steps, int px, int py_, int pt, double nu, std::pair<double, double> beta,
         double sigma, bool supg, const py::object& forcing, double tol) {
        const Problem p = make_problem(n, final_time, steps, nu, beta, sigma, supg, forcing);
        Discretization disc(p.mesh, p.physics);
        SpaceTimePartition part(p.mesh, px, py_, pt);
        SolverConfig cfg;
        cfg.gmres.relative_tolerance = tol;
        SolveReport rep;
        Vector u;
        {
          py::gil_scoped_release release;
          u = solve_spacetime(disc, part, disc.rhs(), cfg, rep);
        }
        py::dict d = finish(p, disc, u);
        d["iterations"] = rep.linear_iterations;
        d["converged"] = rep.converged;
        d["residuals"] = rep.residual_histories.empty() ? std::vector<double>{} : rep.residual_histories[0];
        return d;
      },
      py::arg("n"), py::arg("T"), py::arg("steps"), py::arg("px"), py::arg("py"), py::arg("pt"), py::arg("nu") = 1.0,
      py::arg("beta") = std::pair<double, double>{0.0, 0.0}, py::arg("sigma") = 0.0, py::arg("supg") = false,
      py::arg("forcing") = py::str("sinusoidal"), py::arg("tol") = 1e-8,
      "STBDDC-preconditioned GMRES on the unit square with n x n cells.");

  m.def(
      "solve_direct",
      [](int n, double final_time, int steps, double nu, std::pair<double, double> beta, double sigma, bool supg,
         const py::object& forcing) {
        const Problem p = make_problem(n, final_time, steps, nu, beta, sigma, supg, forcing);
        Discretization disc(p.mesh, p.physics);
        Vector u;
        {
          py::gil_scoped_release release;
          u = solve_stepping_direct(disc);
        }
        return finish(p, disc, u);
      },
      py::arg("n"), py::arg("T"), py::arg("steps"), py::arg("nu") = 1.0,
      py::arg("beta") = std::pair<double, double>{0.0, 0.0}, py::arg("sigma") = 0.0, py::arg("supg") = false,
      py::arg("forcing") = py::str("sinusoidal"), "Backward-Euler stepping with a sparse LU per step.");

  m.def("table1_reference", &table1_reference, py::arg("alpha"), py::arg("nu"));
}
