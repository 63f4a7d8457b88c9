#pragma once

#include <span>

#include "stbddc/core/vector_ops.hpp"
#include "stbddc/fem/mesh.hpp"
#include "stbddc/fem/physics.hpp"

namespace stbddc {

struct ManufacturedSolution {
  ScalarField exact;
  ScalarField forcing;
};

/// u = sin(pi x) sin(pi y) sin(pi t) and the forcing that makes it solve the
/// linear equation with the coefficients of `physics`.
ManufacturedSolution sinusoidal_solution(const PhysicsConfig& physics);

/// Nodal interpolant at time t.
Vector interpolate(const SpaceTimeMesh& mesh, const ScalarField& field, double t);

/// ||u_h - u(., t)||_{L2} with u_h given by nodal values (3x3 Gauss per cell).
double l2_error(const SpaceTimeMesh& mesh, std::span<const double> nodal, const ScalarField& exact, double t);

/// nu0 |grad u|^p at each cell barycenter, u given by nodal values.
Vector plaplacian_viscosity(const SpaceTimeMesh& mesh, std::span<const double> nodal, double nu0, double p);

}  // namespace stbddc
