#include "stbddc/fem/fields.hpp"

#include <cmath>
#include <numbers>

#include "stbddc/core/error.hpp"

namespace stbddc {

ManufacturedSolution sinusoidal_solution(const PhysicsConfig& physics) {
  constexpr double pi = std::numbers::pi;
  const double nu = physics.nu, bx = physics.beta_x, by = physics.beta_y, sigma = physics.sigma;
  ManufacturedSolution s;
  s.exact = [](double x, double y, double t) {
    return std::sin(pi * x) * std::sin(pi * y) * std::sin(pi * t);
  };
  s.forcing = [=](double x, double y, double t) {
    const double sx = std::sin(pi * x), sy = std::sin(pi * y), st = std::sin(pi * t);
    const double cx = std::cos(pi * x), cy = std::cos(pi * y), ct = std::cos(pi * t);
    return sx * sy * (pi * ct + 2.0 * nu * pi * pi * st) + pi * st * (bx * cx * sy + by * sx * cy) +
           sigma * sx * sy * st;
  };
  return s;
}

Vector interpolate(const SpaceTimeMesh& mesh, const ScalarField& field, double t) {
  Vector u(mesh.num_nodes());
  for (int j = 0; j <= mesh.ny(); ++j)
    for (int i = 0; i <= mesh.nx(); ++i) u[mesh.node(i, j)] = field(mesh.x(i), mesh.y(j), t);
  return u;
}

double l2_error(const SpaceTimeMesh& mesh, std::span<const double> nodal, const ScalarField& exact, double t) {
  require(static_cast<int>(nodal.size()) == mesh.num_nodes(), ErrorCode::kDimensionMismatch, "l2_error");
  const double g = std::sqrt(0.6);
  const double pts[3] = {0.5 * (1 - g), 0.5, 0.5 * (1 + g)};
  const double wts[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const double h = mesh.h();
  double sum = 0.0;
  for (int cj = 0; cj < mesh.ny(); ++cj) {
    for (int ci = 0; ci < mesh.nx(); ++ci) {
      int nodes[4];
      mesh.cell_nodes(ci, cj, nodes);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const double xi = pts[a], eta = pts[b];
          const double uh = nodal[nodes[0]] * (1 - xi) * (1 - eta) + nodal[nodes[1]] * xi * (1 - eta) +
                            nodal[nodes[2]] * xi * eta + nodal[nodes[3]] * (1 - xi) * eta;
          const double e = uh - exact(mesh.x(ci) + xi * h, mesh.y(cj) + eta * h, t);
          sum += wts[a] * wts[b] * h * h * e * e;
        }
      }
    }
  }
  return std::sqrt(sum);
}

Vector plaplacian_viscosity(const SpaceTimeMesh& mesh, std::span<const double> nodal, double nu0, double p) {
  require(static_cast<int>(nodal.size()) == mesh.num_nodes(), ErrorCode::kDimensionMismatch,
          "plaplacian_viscosity");
  Vector nu(mesh.num_cells());
  const double h = mesh.h();
  for (int cj = 0; cj < mesh.ny(); ++cj) {
    for (int ci = 0; ci < mesh.nx(); ++ci) {
      int n[4];
      mesh.cell_nodes(ci, cj, n);
      const double u0 = nodal[n[0]], u1 = nodal[n[1]], u2 = nodal[n[2]], u3 = nodal[n[3]];
      const double gx = (-u0 + u1 + u2 - u3) / (2.0 * h);
      const double gy = (-u0 - u1 + u2 + u3) / (2.0 * h);
      const double norm = std::hypot(gx, gy);
      nu[mesh.cell(ci, cj)] = p == 0.0 ? nu0 : nu0 * std::pow(norm, p);
    }
  }
  return nu;
}

}  // namespace stbddc
