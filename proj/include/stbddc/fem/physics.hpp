#pragma once

#include <functional>

namespace stbddc {

/// f(x, y, t)
using ScalarField = std::function<double(double, double, double)>;

inline ScalarField constant_field(double value) {
  return [value](double, double, double) { return value; };
}

enum class TauFormula {
  kInverseRateSum,  // (1/dt + 4 nu/h^2 + 2|beta|/h + sigma)^-1
  kCoth,            // h/(2|beta|) (coth Pe - 1/Pe), steady classical choice
};

/// -div(nu grad u) + beta . grad u + sigma u + du/dt = f, u = g on the
/// boundary, u = u0 at t = 0. When `nonlinear` is set nu is replaced by
/// nu0 |grad u|^p evaluated from a frozen iterate.
struct PhysicsConfig {
  double nu = 1.0;
  double beta_x = 0.0;
  double beta_y = 0.0;
  double sigma = 0.0;
  ScalarField forcing = constant_field(0.0);
  ScalarField dirichlet = constant_field(0.0);
  ScalarField initial = constant_field(0.0);
  bool supg = false;
  TauFormula tau_formula = TauFormula::kInverseRateSum;

  bool nonlinear = false;
  double nu0 = 1.0;
  double p = 0.0;

  double beta_norm() const;
  /// Throws kInvalidArgument on inconsistent coefficients.
  void validate() const;
};

}  // namespace stbddc
