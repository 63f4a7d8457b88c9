#include "stbddc/solvers/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <string>

#include "stbddc/core/sparse_lu.hpp"
#include "stbddc/fem/fields.hpp"

namespace stbddc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// GMRES on disc with an already built preconditioner; x carries the start
// value on entry when `use_x0`.
IterationReport preconditioned_solve(const Discretization& disc, const StbddcPreconditioner& pre,
                                     std::span<const double> rhs, std::span<double> x, bool use_x0,
                                     const SolverConfig& config) {
  InitialGuess guess = config.initial_guess;
  if (guess == InitialGuess::kAuto || pre.bubble_space_is_everything()) guess = InitialGuess::kZero;
  LinearOperator a = [&](std::span<const double> in, std::span<double> out) { disc.apply(in, out); };
  LinearOperator b;
  if (guess == InitialGuess::kZero) {
    if (!use_x0) std::fill(x.begin(), x.end(), 0.0);
    b = [&](std::span<const double> in, std::span<double> out) { pre.apply_full(in, out); };
  } else {
    // make the residual orthogonal to the bubble space
    Vector r(rhs.begin(), rhs.end());
    if (use_x0) {
      Vector ax(x.size());
      disc.apply(x, ax);
      axpy(-1.0, ax, r);
    } else {
      std::fill(x.begin(), x.end(), 0.0);
    }
    axpy(1.0, pre.interior_correction(r), x);
    b = [&](std::span<const double> in, std::span<double> out) { pre.apply(in, out); };
  }
  return gmres(a, b, rhs, x, config.gmres);
}

}  // namespace

Vector solve_spacetime(const Discretization& disc, const SpaceTimePartition& partition, std::span<const double> rhs,
                       const SolverConfig& config, SolveReport& report) {
  require(rhs.size() == disc.size(), ErrorCode::kDimensionMismatch, "solve_spacetime: rhs size");
  const auto t0 = Clock::now();
  StbddcPreconditioner pre(disc, partition, config.stbddc);
  report.setup_seconds += seconds_since(t0);
  const auto t1 = Clock::now();
  Vector x(disc.size(), 0.0);
  const IterationReport it = preconditioned_solve(disc, pre, rhs, x, false, config);
  report.solve_seconds += seconds_since(t1);
  report.linear_iterations += it.iterations;
  report.linear_solves += 1;
  report.iterations_per_solve.push_back(it.iterations);
  report.residual_histories.push_back(it.residual_history);
  report.local_solves += static_cast<long long>(it.iterations) * partition.steps_per_slab();
  report.converged = it.converged;
  if (!it.converged) {
    report.message = "GMRES did not reach the tolerance in " + std::to_string(it.iterations) + " iterations";
  }
  return x;
}

Vector solve_sequential(const Discretization& disc, int px, int py, const SolverConfig& config, SolveReport& report) {
  const int n = disc.num_interior();
  const int steps = disc.num_steps();
  Vector u(disc.size(), 0.0);
  Vector prev = disc.initial_interior();
  SolverConfig cfg = config;
  cfg.stbddc.mode = ConstraintMode::kSpaceOnly;
  std::unique_ptr<Discretization> step_disc;
  std::unique_ptr<SpaceTimePartition> part;
  std::unique_ptr<StbddcPreconditioner> pre;
  const SpatialOperators* built_for = nullptr;
  report.converged = true;
  for (int k = 1; k <= steps; ++k) {
    auto w = std::make_unique<Discretization>(disc.window(k, 1));
    if (&w->step_operators(1) != built_for) {
      // operators changed (or first step): new preconditioner
      const auto t0 = Clock::now();
      step_disc = std::move(w);
      part = std::make_unique<SpaceTimePartition>(step_disc->mesh(), px, py, 1);
      pre = std::make_unique<StbddcPreconditioner>(*step_disc, *part, cfg.stbddc);
      built_for = &step_disc->step_operators(1);
      report.setup_seconds += seconds_since(t0);
      w = std::make_unique<Discretization>(disc.window(k, 1));
    }
    const auto t1 = Clock::now();
    const Vector b = w->rhs(prev);
    Vector x(prev);  // previous step as starting value
    // the preconditioner's operator equals w's, only the time origin differs
    const IterationReport it = preconditioned_solve(*w, *pre, b, x, true, cfg);
    report.solve_seconds += seconds_since(t1);
    report.linear_iterations += it.iterations;
    report.linear_solves += 1;
    report.iterations_per_solve.push_back(it.iterations);
    report.residual_histories.push_back(it.residual_history);
    report.local_solves += it.iterations;
    if (!it.converged) {
      report.converged = false;
      report.message = "GMRES did not converge at step " + std::to_string(k);
      break;
    }
    std::copy(x.begin(), x.end(), u.begin() + static_cast<std::size_t>(k - 1) * n);
    prev = std::move(x);
  }
  return u;
}

Vector solve_monolithic_direct(const Discretization& disc, std::span<const double> rhs, std::size_t cap) {
  require(disc.size() <= cap, ErrorCode::kSizeCapExceeded,
          "monolithic solve: " + std::to_string(disc.size()) + " unknowns exceed the cap of " + std::to_string(cap));
  require(rhs.size() == disc.size(), ErrorCode::kDimensionMismatch, "solve_monolithic_direct: rhs size");
  SparseLU lu(disc.assemble_spacetime());
  return lu.solve(rhs);
}

Vector solve_stepping_direct(const Discretization& disc) {
  const int n = disc.num_interior();
  Vector u(disc.size());
  Vector prev = disc.initial_interior();
  const SpatialOperators* factored_for = nullptr;
  std::unique_ptr<SparseLU> lu;
  for (int k = 1; k <= disc.num_steps(); ++k) {
    const Discretization w = disc.window(k, 1);
    if (&w.step_operators(1) != factored_for) {
      factored_for = &w.step_operators(1);
      lu = std::make_unique<SparseLU>(linear_combination(1.0, w.mass(1), w.dt(), w.stiffness(1)));
    }
    Vector x = lu->solve(w.rhs(prev));
    std::copy(x.begin(), x.end(), u.begin() + static_cast<std::size_t>(k - 1) * n);
    prev = std::move(x);
  }
  return u;
}

std::vector<Vector> viscosity_of(const SpaceTimeMesh& mesh, const PhysicsConfig& physics, std::span<const double> u) {
  const std::size_t n = mesh.num_interior();
  std::vector<Vector> nu(mesh.num_steps());
  for (int k = 1; k <= mesh.num_steps(); ++k) {
    // boundary data at step k
    Vector nodal = interpolate(mesh, physics.dirichlet, mesh.t(k));
    for (int j = 1; j < mesh.ny(); ++j)
      for (int i = 1; i < mesh.nx(); ++i)
        nodal[mesh.node(i, j)] = u[(k - 1) * n + mesh.interior_index(i, j)];
    nu[k - 1] = plaplacian_viscosity(mesh, nodal, physics.nu0, physics.p);
  }
  return nu;
}

namespace {

bool picard_done(const NonlinearConfig& nl, double res, double res0) {
  return nl.relative ? res <= nl.tolerance * res0 : res <= nl.tolerance;
}

bool stalled(const std::vector<double>& history, int window) {
  if (window <= 0 || static_cast<int>(history.size()) <= window) return false;
  const double recent = history.back();
  const double before = history[history.size() - 1 - window];
  return recent >= before;
}

}  // namespace

Vector solve_picard_spacetime(const SpaceTimeMesh& mesh, const PhysicsConfig& physics, int px, int py, int pt,
                              const SolverConfig& config, const NonlinearConfig& nonlinear, SolveReport& report) {
  require(nonlinear.relaxation > 0.0 && nonlinear.relaxation <= 1.0 && nonlinear.tolerance > 0.0,
          ErrorCode::kInvalidArgument, "Picard: relaxation must lie in (0, 1], tolerance > 0");
  const SpaceTimePartition partition(mesh, px, py, pt);
  const std::size_t n = mesh.num_interior();
  Vector u(n * mesh.num_steps());
  {
    const Vector u0 = interpolate(mesh, physics.initial, 0.0);
    for (int k = 0; k < mesh.num_steps(); ++k)
      for (int j = 1; j < mesh.ny(); ++j)
        for (int i = 1; i < mesh.nx(); ++i) u[k * n + mesh.interior_index(i, j)] = u0[mesh.node(i, j)];
  }
  double res0 = 0.0;
  report.converged = false;
  for (int it = 0;; ++it) {
    const Discretization disc(mesh, physics, viscosity_of(mesh, physics, u));
    const Vector b = disc.rhs();
    Vector r(b);
    Vector au(u.size());
    disc.apply(u, au);
    axpy(-1.0, au, r);
    const double res = norm2(r);
    if (it == 0) res0 = res;
    report.nonlinear_residuals.push_back(res);
    if (picard_done(nonlinear, res, res0) && (it > 0 || res == 0.0)) {
      report.converged = true;
      break;
    }
    if (it >= nonlinear.max_iterations) {
      report.message = "Picard iteration limit reached";
      break;
    }
    if (stalled(report.nonlinear_residuals, nonlinear.stall_window)) {
      report.message = "Picard stalled";
      break;
    }
    SolveReport lin;
    const Vector ustar = solve_spacetime(disc, partition, b, config, lin);
    report.picard_iterations += 1;
    report.linear_iterations += lin.linear_iterations;
    report.linear_solves += 1;
    report.local_solves += lin.local_solves;
    report.setup_seconds += lin.setup_seconds;
    report.solve_seconds += lin.solve_seconds;
    report.iterations_per_solve.push_back(lin.linear_iterations);
    if (!lin.converged) {
      report.message = "linear solve failed in Picard iteration " + std::to_string(it + 1);
      return u;
    }
    for (std::size_t i = 0; i < u.size(); ++i)
      u[i] = nonlinear.relaxation * ustar[i] + (1.0 - nonlinear.relaxation) * u[i];
  }
  return u;
}

Vector solve_picard_sequential(const SpaceTimeMesh& mesh, const PhysicsConfig& physics, int px, int py,
                               const SolverConfig& config, const NonlinearConfig& nonlinear, SolveReport& report) {
  const std::size_t n = mesh.num_interior();
  Vector u(n * mesh.num_steps());
  Vector prev;
  {
    const Vector u0 = interpolate(mesh, physics.initial, 0.0);
    prev.resize(n);
    for (int j = 1; j < mesh.ny(); ++j)
      for (int i = 1; i < mesh.nx(); ++i) prev[mesh.interior_index(i, j)] = u0[mesh.node(i, j)];
  }
  SolverConfig cfg = config;
  cfg.stbddc.mode = ConstraintMode::kSpaceOnly;
  report.converged = true;
  for (int k = 1; k <= mesh.num_steps(); ++k) {
    Vector uk = prev;
    double res0 = 0.0;
    std::vector<double> history;
    bool done = false;
    for (int it = 0; !done; ++it) {
      Vector nodal = interpolate(mesh, physics.dirichlet, mesh.t(k));
      for (int j = 1; j < mesh.ny(); ++j)
        for (int i = 1; i < mesh.nx(); ++i) nodal[mesh.node(i, j)] = uk[mesh.interior_index(i, j)];
      const Vector nu = plaplacian_viscosity(mesh, nodal, physics.nu0, physics.p);
      const Discretization disc = Discretization::single_step(mesh, physics, k, nu);
      const Vector b = disc.rhs(prev);
      Vector r(b), au(n);
      disc.apply(uk, au);
      axpy(-1.0, au, r);
      const double res = norm2(r);
      if (it == 0) res0 = res;
      history.push_back(res);
      if (picard_done(nonlinear, res, res0) && (it > 0 || res == 0.0)) break;
      if (it >= nonlinear.max_iterations || stalled(history, nonlinear.stall_window)) {
        report.converged = false;
        report.message = "Picard did not converge at step " + std::to_string(k);
        break;
      }
      const SpaceTimePartition part(disc.mesh(), px, py, 1);
      SolveReport lin;
      const auto t0 = Clock::now();
      StbddcPreconditioner pre(disc, part, cfg.stbddc);
      report.setup_seconds += seconds_since(t0);
      const auto t1 = Clock::now();
      Vector x(uk);
      const IterationReport rep = preconditioned_solve(disc, pre, b, x, true, cfg);
      report.solve_seconds += seconds_since(t1);
      report.picard_iterations += 1;
      report.linear_iterations += rep.iterations;
      report.linear_solves += 1;
      report.local_solves += rep.iterations;
      report.iterations_per_solve.push_back(rep.iterations);
      if (!rep.converged) {
        report.converged = false;
        report.message = "linear solve failed at step " + std::to_string(k);
        return u;
      }
      for (std::size_t i = 0; i < n; ++i) uk[i] = nonlinear.relaxation * x[i] + (1.0 - nonlinear.relaxation) * uk[i];
    }
    report.nonlinear_residuals.push_back(history.back());
    std::copy(uk.begin(), uk.end(), u.begin() + static_cast<std::size_t>(k - 1) * n);
    prev = std::move(uk);
    if (!report.converged) break;
  }
  return u;
}

}  // namespace stbddc
