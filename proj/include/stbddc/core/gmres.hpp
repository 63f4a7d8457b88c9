#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stbddc/core/vector_ops.hpp"

namespace stbddc {

/// y = Op(x); x and y never alias.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct GmresConfig {
  double relative_tolerance = 1e-6;
  int max_iterations = 1000;
  int restart = 0;  // 0 means never restart
};

struct IterationReport {
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  std::vector<double> residual_history;  // Arnoldi residual norms, entry 0 is ||r0||
};

/// Right-preconditioned GMRES: iterates on A B y = r0 and returns x = x0 + B y
/// in `x` (which carries x0 on entry). Stops when ||r_k|| <= tol * ||r_0||.
/// An empty preconditioner means B = I.
IterationReport gmres(const LinearOperator& a, const LinearOperator& preconditioner,
                      std::span<const double> b, std::span<double> x, const GmresConfig& config);

}  // namespace stbddc
