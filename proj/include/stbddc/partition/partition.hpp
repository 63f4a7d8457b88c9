#pragma once

#include <span>
#include <vector>

#include "stbddc/fem/mesh.hpp"

namespace stbddc {

/// Spatial subdomain: a block of cells_x x cells_y cells. Its local DOFs are
/// the non-Dirichlet nodes of its closure, ordered row-major.
struct SpatialSubdomain {
  int index = 0;
  int sx = 0, sy = 0;
  int cell_i0 = 0, cell_j0 = 0;     // lower-left cell
  std::vector<int> dofs;            // global interior DOF of each local node
  std::vector<int> local_of_global; // -1 when the DOF is outside the closure; size = mesh interior count
  /// Cells of the subdomain touching each local node (1, 2 or 4).
  std::vector<int> cells_at_node;
  int num_local() const { return static_cast<int>(dofs.size()); }
};

/// Cartesian space-time partition into P_x x P_y spatial blocks and P_t time
/// slabs of K_n steps each. Layer n (0-based) owns global steps
/// n*K_n + 1 .. (n+1)*K_n; its local layout also holds step n*K_n as local
/// step 0 when n >= 1.
class SpaceTimePartition {
 public:
  SpaceTimePartition(const SpaceTimeMesh& mesh, int px, int py, int pt);

  const SpaceTimeMesh& mesh() const { return mesh_; }
  int px() const { return px_; }
  int py() const { return py_; }
  int pt() const { return pt_; }
  int cells_x() const { return cells_x_; }
  int cells_y() const { return cells_y_; }
  int steps_per_slab() const { return steps_; }
  int num_spatial() const { return px_ * py_; }
  int num_subdomains() const { return px_ * py_ * pt_; }

  const SpatialSubdomain& spatial(int omega) const { return spatial_[omega]; }
  /// Sorted spatial subdomains whose closure contains interior DOF `dof`.
  std::span<const int> neighbors(int dof) const {
    return {neigh_idx_.data() + neigh_ptr_[dof], static_cast<std::size_t>(neigh_ptr_[dof + 1] - neigh_ptr_[dof])};
  }
  int multiplicity(int dof) const { return neigh_ptr_[dof + 1] - neigh_ptr_[dof]; }
  bool is_interface(int dof) const { return multiplicity(dof) > 1; }

 private:
  SpaceTimeMesh mesh_;
  int px_, py_, pt_;
  int cells_x_, cells_y_, steps_;
  std::vector<SpatialSubdomain> spatial_;
  std::vector<int> neigh_ptr_, neigh_idx_;
};

/// Index of space-time subdomain (omega, layer).
inline int subdomain_id(const SpaceTimePartition& p, int omega, int layer) {
  return layer * p.num_spatial() + omega;
}

/// Local layout of one space-time subdomain.
struct LocalLayout {
  int omega = 0;
  int layer = 0;
  int first_step = 1;    // 0 when the layer has a predecessor
  int last_step = 1;     // K_n
  int nodes = 0;         // spatial DOFs per step
  bool first_in_time = true;
  bool last_in_time = true;
  int num_steps() const { return last_step - first_step + 1; }
  int size() const { return num_steps() * nodes; }
  int index(int step, int node) const { return (step - first_step) * nodes + node; }
  /// Global step of local step s.
  int global_step(int s, int steps_per_slab) const { return layer * steps_per_slab + s; }
};

LocalLayout local_layout(const SpaceTimePartition& p, int omega, int layer);

}  // namespace stbddc
