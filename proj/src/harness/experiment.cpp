#include "stbddc/harness/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>

#include "json.hpp"
#include "stbddc/core/parallel.hpp"
#include "stbddc/fem/fields.hpp"
#include "stbddc/solvers/solvers.hpp"

namespace stbddc {

namespace {

struct Point {
  int alpha = 1;
  double nu = 1.0;
  SpaceTimeMesh mesh;
  PhysicsConfig physics;
  ScalarField exact;  // empty unless the forcing is the manufactured one
  int px = 1, py = 1, pt = 1;
};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfig, what); }

int whole(double value, const char* what) {
  const double r = std::round(value);
  if (r < 1 || std::abs(value - r) > 1e-9 * std::max(1.0, std::abs(value)))
    config_error(std::string(what) + " is not a whole number of cells/steps (" + std::to_string(value) + ")");
  return static_cast<int>(r);
}

ScalarField field_of(const FieldSpec& f) {
  if (f.kind == FieldSpec::Kind::kXPlusY) return [](double x, double y, double) { return x + y; };
  return constant_field(f.value);
}

Point resolve(const ExperimentConfig& c, int alpha, double nu) {
  Point pt;
  pt.alpha = alpha;
  pt.nu = nu;
  const bool time_only = c.mode == RunMode::kTimeOnly;
  const int s = time_only ? 1 : alpha;
  const double lx = c.length_x * s, ly = c.length_y * s, t = c.final_time * alpha;
  pt.px = c.px * s;
  pt.py = c.py * s;
  pt.pt = c.pt * alpha;
  int nx, ny, steps;
  if (c.h > 0) {
    nx = whole(lx / c.h, "domain.lx / mesh.h");
    ny = whole(ly / c.h, "domain.ly / mesh.h");
    steps = whole(t / c.dt, "domain.T / mesh.dt");
  } else {
    nx = pt.px * c.cells_per_subdomain;
    ny = pt.py * c.cells_per_subdomain;
    steps = pt.pt * c.steps_per_slab;
  }
  if (std::abs(lx / nx - ly / ny) > 1e-12 * (lx / nx)) config_error("cells must be square: lx/h and ly/h disagree");
  pt.mesh = SpaceTimeMesh(lx, ly, nx, ny, t, steps);

  PhysicsConfig& p = pt.physics;
  p.nu = nu;
  p.beta_x = c.beta_x;
  p.beta_y = c.beta_y;
  p.sigma = c.sigma;
  p.supg = c.supg;
  p.tau_formula = c.tau;
  p.nonlinear = c.nonlinear;
  p.nu0 = c.nu0;
  p.p = c.p;
  if (c.forcing.kind == FieldSpec::Kind::kSinusoidal) {
    if (c.nonlinear) config_error("physics: the sinusoidal solution is only available for linear problems");
    const ManufacturedSolution ms = sinusoidal_solution(p);
    p.forcing = ms.forcing;
    p.dirichlet = ms.exact;
    p.initial = ms.exact;
    pt.exact = ms.exact;
  } else {
    p.forcing = field_of(c.forcing);
    p.dirichlet = field_of(c.dirichlet);
    p.initial = field_of(c.initial);
  }
  try {
    p.validate();
  } catch (const Error& e) {
    config_error(std::string("physics: ") + e.what());
  }
  return pt;
}

int effective_threads(const ExperimentConfig& c) {
  return std::getenv(kThreadsEnvVar) ? thread_count() : c.threads;
}

ResultRow solve_point(const ExperimentConfig& c, const Point& pt) {
  ResultRow row;
  const SpaceTimeMesh& mesh = pt.mesh;
  row.alpha = pt.alpha;
  row.px = pt.px;
  row.py = pt.py;
  row.pt = pt.pt;
  row.subdomains = pt.px * pt.py * pt.pt;
  row.cells_per_subdomain = mesh.nx() / pt.px;
  row.steps_per_slab = mesh.num_steps() / pt.pt;
  const double beta = pt.physics.beta_norm();
  const double nu = c.nonlinear ? c.nu0 : pt.nu;
  row.cfl_beta = beta * mesh.dt() / mesh.h();
  row.cfl_nu = nu * mesh.dt() / (mesh.h() * mesh.h());
  row.peclet = beta * mesh.h() / (2.0 * nu);
  row.nu = nu;
  row.nx = mesh.nx();
  row.ny = mesh.ny();
  row.num_steps = mesh.num_steps();
  row.h = mesh.h();
  row.dt = mesh.dt();

  SolverConfig cfg = c.solver;
  cfg.stbddc.threads = effective_threads(c);
  SolveReport rep;
  Vector u;
  try {
    if (c.mode == RunMode::kOracle) {
      if (c.nonlinear) config_error("oracle mode supports linear problems only");
      const auto t0 = std::chrono::steady_clock::now();
      Discretization disc(mesh, pt.physics);
      try {
        u = solve_monolithic_direct(disc, disc.rhs());
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSizeCapExceeded) throw;
        u = solve_stepping_direct(disc);
      }
      rep.converged = true;
      rep.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } else if (c.nonlinear) {
      if (c.mode == RunMode::kSequential) {
        u = solve_picard_sequential(mesh, pt.physics, pt.px, pt.py, cfg, c.picard, rep);
      } else {
        u = solve_picard_spacetime(mesh, pt.physics, pt.px, pt.py, pt.pt, cfg, c.picard, rep);
      }
    } else {
      Discretization disc(mesh, pt.physics);
      if (c.mode == RunMode::kSequential) {
        u = solve_sequential(disc, pt.px, pt.py, cfg, rep);
      } else {
        u = solve_spacetime(disc, SpaceTimePartition(mesh, pt.px, pt.py, pt.pt), disc.rhs(), cfg, rep);
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    rep.converged = false;
    rep.message = e.what();
  }
  row.linear_iterations = rep.linear_iterations;
  row.picard_iterations = rep.picard_iterations;
  row.local_solves = rep.local_solves;
  row.setup_seconds = rep.setup_seconds;
  row.solve_seconds = rep.solve_seconds;
  row.converged = rep.converged;
  row.message = rep.message;
  if (pt.exact && u.size() == static_cast<std::size_t>(mesh.num_spacetime_dofs())) {
    Discretization disc(mesh, pt.physics);
    const int n = mesh.num_interior(), k = mesh.num_steps();
    const Vector nodal = disc.nodal_field(k, std::span<const double>(u).subspan(static_cast<std::size_t>(k - 1) * n, n));
    row.l2_error = l2_error(mesh, nodal, pt.exact, mesh.final_time());
  }
  return row;
}

std::string num(double v, const char* format = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "alpha,px,py,pt,subdomains,H_over_h,K_n,cfl_beta,cfl_nu,peclet,linear_iterations,picard_iterations,"
         "local_solves,setup_seconds,solve_seconds,l2_error_T,converged";
}

std::string csv_line(const ResultRow& r) {
  std::string s;
  s += std::to_string(r.alpha) + "," + std::to_string(r.px) + "," + std::to_string(r.py) + "," + std::to_string(r.pt);
  s += "," + std::to_string(r.subdomains) + "," + std::to_string(r.cells_per_subdomain) + "," +
       std::to_string(r.steps_per_slab);
  s += "," + num(r.cfl_beta) + "," + num(r.cfl_nu) + "," + num(r.peclet);
  s += "," + std::to_string(r.linear_iterations) + "," + std::to_string(r.picard_iterations) + "," +
       std::to_string(r.local_solves);
  s += "," + num(r.setup_seconds, "%.3f") + "," + num(r.solve_seconds, "%.3f");
  s += "," + (r.l2_error ? num(*r.l2_error, "%.6e") : std::string());
  s += r.converged ? ",1" : ",0";
  return s;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& r : rows) out << csv_line(r) << '\n';
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::ostream* progress) {
  // resolve every point first so infeasible sweeps fail before any solve
  std::vector<Point> points;
  const std::vector<double> nus = config.nonlinear ? std::vector<double>{config.nu0} : config.nu_values;
  for (int alpha : config.scaling) {
    if (alpha < 1) config_error("scaling factors must be >= 1");
    for (double nu : nus) {
      Point p = resolve(config, alpha, nu);
      if (config.mode != RunMode::kOracle) SpaceTimePartition(p.mesh, p.px, p.py, config.mode == RunMode::kSequential ? 1 : p.pt);
      points.push_back(std::move(p));
    }
  }
  std::vector<ResultRow> rows;
  for (const Point& p : points) {
    rows.push_back(solve_point(config, p));
    if (progress) {
      const ResultRow& r = rows.back();
      *progress << "alpha=" << r.alpha << " nu=" << r.nu << " P=(" << r.px << "x" << r.py << ")x" << r.pt
                << " iterations=" << r.linear_iterations;
      if (config.nonlinear) *progress << " picard=" << r.picard_iterations;
      *progress << (r.converged ? "" : " NOT CONVERGED: " + r.message) << '\n';
    }
  }
  return rows;
}

std::string sidecar_json(const ExperimentConfig& config, const std::vector<ResultRow>& rows) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_to_json(config));
  j["threads"] = effective_threads(config);
  j["columns"] = csv_header();
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : rows) {
    list.push_back({{"alpha", r.alpha},
                    {"nu", r.nu},
                    {"nx", r.nx},
                    {"ny", r.ny},
                    {"num_steps", r.num_steps},
                    {"h", r.h},
                    {"dt", r.dt},
                    {"converged", r.converged},
                    {"message", r.message}});
  }
  j["rows"] = list;
  return j.dump(2);
}

std::string sidecar_path(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".json").string();
}

ExperimentConfig table1_config(int rows) {
  ExperimentConfig c;
  c.name = "table1";
  c.mode = RunMode::kSpaceTime;
  c.length_x = c.length_y = 0.9;
  c.final_time = 0.3;
  c.h = 0.01;
  c.dt = 0.01;
  c.px = c.py = 3;
  c.pt = 1;
  c.scaling.clear();
  for (int a = 1; a <= rows; ++a) c.scaling.push_back(a);
  c.nu_values = {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6};
  c.beta_x = 1.0;
  c.beta_y = 0.0;
  c.sigma = 1e-4;
  c.forcing = {FieldSpec::Kind::kConstant, 1.0};
  c.supg = true;
  c.tau = TauFormula::kCoth;
  return c;
}

std::optional<int> table1_reference(int alpha, double nu) {
  static const std::map<int, std::vector<int>> ref{{1, {18, 11, 7, 5, 5, 5}}, {2, {28, 16, 11, 11, 11, 11}}};
  static const double nus[] = {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6};
  const auto it = ref.find(alpha);
  if (it == ref.end()) return std::nullopt;
  for (int i = 0; i < 6; ++i)
    if (std::abs(nu - nus[i]) <= 1e-12 * nus[i]) return it->second[i];
  return std::nullopt;
}

}  // namespace stbddc
