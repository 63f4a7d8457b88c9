#pragma once

#include <memory>
#include <span>
#include <vector>

#include "stbddc/core/sparse_matrix.hpp"
#include "stbddc/fem/element.hpp"
#include "stbddc/fem/mesh.hpp"
#include "stbddc/fem/physics.hpp"

namespace stbddc {

/// Spatial operators of one time step. The `_boundary` matrices couple the
/// interior rows to Dirichlet columns (indexed by global node number) and only
/// feed the right-hand side.
struct SpatialOperators {
  SparseMatrix mass;
  SparseMatrix stiffness;
  SparseMatrix mass_boundary;
  SparseMatrix stiffness_boundary;
  /// Either one entry (uniform coefficients) or one per cell.
  std::vector<ElementMatrices> elements;

  const ElementMatrices& element(int cell) const { return elements.size() == 1 ? elements[0] : elements[cell]; }
};

/// `cell_viscosity` (one value per cell) replaces nu when non-empty.
SpatialOperators assemble_spatial_operators(const SpaceTimeMesh& mesh, const PhysicsConfig& physics,
                                            std::span<const double> cell_viscosity = {});

/// Backward-Euler Q1 discretization on interior DOFs:
///   M^k (u^k - u^{k-1}) + dt K^k u^k = rhs_k,  k = 1..K,
/// with u^0 and the Dirichlet data moved to the right-hand side.
class Discretization {
 public:
  Discretization(SpaceTimeMesh mesh, PhysicsConfig physics);
  /// viscosity[k - 1][cell] for k = 1..K (nonlinear linearization).
  Discretization(SpaceTimeMesh mesh, PhysicsConfig physics, const std::vector<Vector>& viscosity);

  const SpaceTimeMesh& mesh() const { return mesh_; }
  const PhysicsConfig& physics() const { return physics_; }
  int num_steps() const { return static_cast<int>(ops_.size()); }
  int num_interior() const { return mesh_.num_interior(); }
  std::size_t size() const { return static_cast<std::size_t>(num_interior()) * num_steps(); }
  double dt() const { return mesh_.dt(); }
  /// Physical time of local step k.
  double time(int step) const { return (first_step_ - 1 + step) * mesh_.dt(); }
  int first_step() const { return first_step_; }

  /// step in 1..num_steps()
  const SpatialOperators& step_operators(int step) const { return *ops_[step - 1]; }
  const SparseMatrix& mass(int step) const { return ops_[step - 1]->mass; }
  const SparseMatrix& stiffness(int step) const { return ops_[step - 1]->stiffness; }
  const ElementMatrices& element(int cell, int step) const { return ops_[step - 1]->element(cell); }

  /// out = A u for step-major space-time vectors.
  void apply(std::span<const double> u, std::span<double> out) const;
  void apply_transpose(std::span<const double> u, std::span<double> out) const;
  /// Explicit space-time matrix (oracles only).
  SparseMatrix assemble_spacetime() const;

  /// Right-hand side including the lifting of Dirichlet data. The initial state
  /// defaults to the interior values of u0 (or of g for windows not starting
  /// at step 1).
  Vector rhs(std::span<const double> initial_interior = {}) const;
  /// Load vector dt * F^k alone, for one step.
  Vector load(int step) const;

  Vector initial_interior() const;
  /// Full nodal field at local step k (0 = initial state) from interior values.
  Vector nodal_field(int step, std::span<const double> interior_values) const;
  /// Dirichlet values at step k on boundary nodes, zero elsewhere.
  Vector boundary_values(int step) const;

  /// Steps first..first+count-1 as a standalone problem (operators shared).
  Discretization window(int first, int count) const;
  /// Step `step` of `mesh` alone, with its own cell viscosity (may be empty).
  static Discretization single_step(const SpaceTimeMesh& mesh, const PhysicsConfig& physics, int step,
                                    std::span<const double> cell_viscosity);

 private:
  Discretization() = default;
  SpaceTimeMesh mesh_;
  PhysicsConfig physics_;
  int first_step_ = 1;
  std::vector<std::shared_ptr<const SpatialOperators>> ops_;
};

}  // namespace stbddc
