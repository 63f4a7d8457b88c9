#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stbddc/harness/config.hpp"

namespace stbddc {

/// One sweep point. CSV columns follow the member order up to `converged`.
struct ResultRow {
  int alpha = 1;
  int px = 1, py = 1, pt = 1;
  int subdomains = 1;
  int cells_per_subdomain = 0;  // H/h
  int steps_per_slab = 0;       // K_n
  double cfl_beta = 0.0;        // |beta| dt / h
  double cfl_nu = 0.0;          // nu dt / h^2
  double peclet = 0.0;          // |beta| h / (2 nu), 0 without convection
  int linear_iterations = 0;
  int picard_iterations = 0;
  long long local_solves = 0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  std::optional<double> l2_error;  // at t = T, only with a known exact solution
  bool converged = false;

  // sidecar only
  double nu = 0.0;
  int nx = 0, ny = 0, num_steps = 0;
  double h = 0.0, dt = 0.0;
  std::string message;
};

/// Fixed CSV header.
std::string csv_header();
std::string csv_line(const ResultRow& row);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// Runs every (alpha, nu) point of the sweep. Throws Error(kConfig) or
/// Error(kInvalidPartition) before solving anything if a point is infeasible;
/// solver failures are recorded in the row and the sweep continues.
/// `progress`, when given, gets one line per finished point.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::ostream* progress = nullptr);

/// Resolved config, effective thread count and per-row metadata as JSON.
std::string sidecar_json(const ExperimentConfig& config, const std::vector<ResultRow>& rows);

/// Sidecar path for a CSV path: the extension replaced by .json.
std::string sidecar_path(const std::string& csv_path);

/// CDR sweep with reference iteration counts for the first two rows.
ExperimentConfig table1_config(int rows);
/// Reference iteration count for (alpha, nu), or nullopt.
std::optional<int> table1_reference(int alpha, double nu);

}  // namespace stbddc
