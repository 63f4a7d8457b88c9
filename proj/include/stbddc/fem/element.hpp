#pragma once

#include <array>

#include "stbddc/fem/physics.hpp"

namespace stbddc {

/// 4x4 element matrices, row = test function, nodes ordered counter-clockwise
/// from the lower-left corner. SUPG terms (test N_i + tau beta.grad N_i) are
/// already folded into both matrices.
struct ElementMatrices {
  std::array<double, 16> mass{};
  std::array<double, 16> stiffness{};
  double tau = 0.0;

  double m(int i, int j) const { return mass[4 * i + j]; }
  double k(int i, int j) const { return stiffness[4 * i + j]; }
};

double supg_tau(double h, double nu, double beta_norm, double sigma, double dt,
                TauFormula formula = TauFormula::kInverseRateSum);

/// Throws kNonPositiveCellSize for h <= 0.
ElementMatrices element_matrices(double h, double nu, double beta_x, double beta_y, double sigma, double dt,
                                 bool supg, TauFormula formula = TauFormula::kInverseRateSum);

/// Load vector of f over the cell with lower-left corner (x0, y0) at time t,
/// tested against N_i + tau beta.grad N_i. 2x2 Gauss.
std::array<double, 4> element_load(double h, double x0, double y0, double t, const ScalarField& f, double tau,
                                   double beta_x, double beta_y);

}  // namespace stbddc
