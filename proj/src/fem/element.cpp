#include "stbddc/fem/element.hpp"

#include <cmath>

#include "stbddc/core/error.hpp"

namespace stbddc {

double PhysicsConfig::beta_norm() const { return std::hypot(beta_x, beta_y); }

void PhysicsConfig::validate() const {
  require(std::isfinite(nu) && std::isfinite(beta_x) && std::isfinite(beta_y) && std::isfinite(sigma),
          ErrorCode::kInvalidArgument, "physics: coefficients must be finite");
  require(sigma >= 0.0, ErrorCode::kInvalidArgument, "physics: reaction must be non-negative");
  require(forcing && dirichlet && initial, ErrorCode::kInvalidArgument, "physics: missing data field");
  if (nonlinear) {
    require(nu0 > 0.0 && p >= 0.0, ErrorCode::kInvalidArgument, "physics: nonlinear case needs nu0 > 0, p >= 0");
  } else {
    require(nu >= 0.0, ErrorCode::kInvalidArgument, "physics: diffusion must be non-negative");
    require(nu > 0.0 || (supg && beta_norm() > 0.0), ErrorCode::kInvalidArgument,
            "physics: nu = 0 needs SUPG with nonzero convection");
  }
}

namespace {

const double kGauss[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};

// Bilinear shape functions on the unit square and their reference gradients.
void shape(double xi, double eta, double n[4], double dxi[4], double deta[4]) {
  n[0] = (1 - xi) * (1 - eta);
  n[1] = xi * (1 - eta);
  n[2] = xi * eta;
  n[3] = (1 - xi) * eta;
  dxi[0] = -(1 - eta);
  dxi[1] = (1 - eta);
  dxi[2] = eta;
  dxi[3] = -eta;
  deta[0] = -(1 - xi);
  deta[1] = -xi;
  deta[2] = xi;
  deta[3] = 1 - xi;
}

}  // namespace

double supg_tau(double h, double nu, double beta_norm, double sigma, double dt, TauFormula formula) {
  if (formula == TauFormula::kCoth) {
    if (beta_norm == 0.0) return 0.0;
    if (nu == 0.0) return h / (2.0 * beta_norm);
    const double pe = beta_norm * h / (2.0 * nu);
    // coth(Pe) - 1/Pe, series for small Pe to avoid cancellation
    const double xi = pe < 1e-3 ? pe / 3.0 : 1.0 / std::tanh(pe) - 1.0 / pe;
    return h / (2.0 * beta_norm) * xi;
  }
  return 1.0 / (1.0 / dt + 4.0 * nu / (h * h) + 2.0 * beta_norm / h + sigma);
}

ElementMatrices element_matrices(double h, double nu, double beta_x, double beta_y, double sigma, double dt,
                                 bool supg, TauFormula formula) {
  require(h > 0.0, ErrorCode::kNonPositiveCellSize, "element_matrices: h must be positive");
  ElementMatrices e;
  e.tau = supg ? supg_tau(h, nu, std::hypot(beta_x, beta_y), sigma, dt, formula) : 0.0;
  const double w = 0.25 * h * h;
  double n[4], dxi[4], deta[4];
  for (double xi : kGauss) {
    for (double eta : kGauss) {
      shape(xi, eta, n, dxi, deta);
      double gx[4], gy[4], conv[4], test[4];
      for (int a = 0; a < 4; ++a) {
        gx[a] = dxi[a] / h;
        gy[a] = deta[a] / h;
        conv[a] = beta_x * gx[a] + beta_y * gy[a];
        test[a] = n[a] + e.tau * conv[a];
      }
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          e.mass[4 * i + j] += w * test[i] * n[j];
          // convection split into its skew part; same assembled rows for
          // interior test functions, but each subdomain matrix stays positive
          e.stiffness[4 * i + j] +=
              w * (nu * (gx[i] * gx[j] + gy[i] * gy[j]) + 0.5 * (n[i] * conv[j] - conv[i] * n[j]) +
                   e.tau * conv[i] * conv[j] + test[i] * sigma * n[j]);
        }
      }
    }
  }
  return e;
}

std::array<double, 4> element_load(double h, double x0, double y0, double t, const ScalarField& f, double tau,
                                   double beta_x, double beta_y) {
  std::array<double, 4> load{};
  const double w = 0.25 * h * h;
  double n[4], dxi[4], deta[4];
  for (double xi : kGauss) {
    for (double eta : kGauss) {
      shape(xi, eta, n, dxi, deta);
      const double fv = f(x0 + xi * h, y0 + eta * h, t);
      for (int a = 0; a < 4; ++a) {
        const double test = n[a] + tau * (beta_x * dxi[a] + beta_y * deta[a]) / h;
        load[a] += w * fv * test;
      }
    }
  }
  return load;
}

}  // namespace stbddc
