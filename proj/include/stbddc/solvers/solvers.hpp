#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stbddc/core/gmres.hpp"
#include "stbddc/dd/preconditioner.hpp"
#include "stbddc/fem/discretization.hpp"
#include "stbddc/partition/partition.hpp"

namespace stbddc {

enum class InitialGuess {
  kAuto,                // same as kZero
  kInteriorCorrection,  // u0 = I0 A0^-1 I0^T b, simplified preconditioner (falls back to kZero without interface)
  kZero,                // u0 = 0 (or the caller's start), full additive preconditioner
};

struct SolverConfig {
  GmresConfig gmres;
  StbddcOptions stbddc;
  InitialGuess initial_guess = InitialGuess::kAuto;
};

struct NonlinearConfig {
  double relaxation = 0.75;
  double tolerance = 1e-3;
  /// Tolerance applies to ||r_k|| / ||r_0|| when true, to ||r_k|| otherwise.
  bool relative = true;
  int max_iterations = 30;
  /// Stop as stalled when the residual has not decreased for this many iterations.
  int stall_window = 8;
};

struct SolveReport {
  bool converged = false;
  int linear_iterations = 0;  // accumulated over all linear solves
  int picard_iterations = 0;
  int linear_solves = 0;
  long long local_solves = 0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  std::vector<int> iterations_per_solve;
  std::vector<std::vector<double>> residual_histories;
  std::vector<double> nonlinear_residuals;
  std::string message;
};

/// One-shot space-time solve of A u = rhs with STBDDC-preconditioned GMRES.
Vector solve_spacetime(const Discretization& disc, const SpaceTimePartition& partition, std::span<const double> rhs,
                       const SolverConfig& config, SolveReport& report);

/// Sequential-in-time baseline: one space-BDDC preconditioned GMRES solve per
/// step on a px x py spatial partition.
Vector solve_sequential(const Discretization& disc, int px, int py, const SolverConfig& config, SolveReport& report);

/// Sparse LU of the explicit space-time matrix. Throws kSizeCapExceeded above `cap` unknowns.
Vector solve_monolithic_direct(const Discretization& disc, std::span<const double> rhs, std::size_t cap = 200000);

/// Backward-Euler stepping with a sparse LU per step (no size cap).
Vector solve_stepping_direct(const Discretization& disc);

/// Picard iteration for nu = nu0 |grad u|^p over the whole space-time cylinder.
/// The initial iterate is u0 repeated at every step.
Vector solve_picard_spacetime(const SpaceTimeMesh& mesh, const PhysicsConfig& physics, int px, int py, int pt,
                              const SolverConfig& config, const NonlinearConfig& nonlinear, SolveReport& report);

/// Picard iteration step by step, each step solved with space BDDC.
Vector solve_picard_sequential(const SpaceTimeMesh& mesh, const PhysicsConfig& physics, int px, int py,
                               const SolverConfig& config, const NonlinearConfig& nonlinear, SolveReport& report);

/// Per-step cell viscosity of a space-time iterate (interior values).
std::vector<Vector> viscosity_of(const SpaceTimeMesh& mesh, const PhysicsConfig& physics, std::span<const double> u);

}  // namespace stbddc
