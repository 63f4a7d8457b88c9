#pragma once

#include <string>
#include <vector>

#include "stbddc/fem/physics.hpp"
#include "stbddc/solvers/solvers.hpp"

namespace stbddc {

enum class RunMode { kSpaceTime, kTimeOnly, kSequential, kOracle };

/// Data field given in a config: a constant, x + y, or the manufactured
/// sinusoidal solution (forcing and exact solution derived from the physics).
struct FieldSpec {
  enum class Kind { kConstant, kXPlusY, kSinusoidal } kind = Kind::kConstant;
  double value = 0.0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  RunMode mode = RunMode::kSpaceTime;

  // domain and time interval at scaling factor 1
  double length_x = 1.0;
  double length_y = 1.0;
  double final_time = 1.0;

  // either h and dt directly, or H/h and K_n (0 = unset)
  double h = 0.0;
  double dt = 0.0;
  int cells_per_subdomain = 0;
  int steps_per_slab = 0;

  int px = 1, py = 1, pt = 1;
  std::vector<int> scaling{1};

  std::vector<double> nu_values{1.0};
  double beta_x = 0.0, beta_y = 0.0, sigma = 0.0;
  FieldSpec forcing, dirichlet, initial;
  bool supg = false;
  TauFormula tau = TauFormula::kInverseRateSum;
  bool nonlinear = false;
  double nu0 = 1.0, p = 0.0;

  SolverConfig solver;
  NonlinearConfig picard;
  int threads = 1;

  std::string output;  // CSV path; empty = stdout only
  unsigned seed = 1;
};

/// Parses JSON text. Throws Error(kConfig) with a line number on malformed
/// input and with the offending key on invalid values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Fully resolved config (every default spelled out) as pretty JSON.
std::string config_to_json(const ExperimentConfig& config);

std::string to_string(RunMode mode);

}  // namespace stbddc
