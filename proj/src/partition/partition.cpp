#include "stbddc/partition/partition.hpp"

#include <string>

namespace stbddc {

SpaceTimePartition::SpaceTimePartition(const SpaceTimeMesh& mesh, int px, int py, int pt)
    : mesh_(mesh), px_(px), py_(py), pt_(pt) {
  require(px >= 1 && py >= 1 && pt >= 1, ErrorCode::kInvalidPartition, "partition counts must be positive");
  require(mesh.nx() % px == 0 && mesh.ny() % py == 0 && mesh.num_steps() % pt == 0,
          ErrorCode::kInvalidPartition,
          "partition " + std::to_string(px) + "x" + std::to_string(py) + "x" + std::to_string(pt) +
              " does not divide grid " + std::to_string(mesh.nx()) + "x" + std::to_string(mesh.ny()) + "x" +
              std::to_string(mesh.num_steps()));
  cells_x_ = mesh.nx() / px;
  cells_y_ = mesh.ny() / py;
  steps_ = mesh.num_steps() / pt;

  const int n_int = mesh.num_interior();
  // subdomains containing grid line i: one, or two on an internal cut
  auto owners = [](int i, int cells, int parts, int out[2]) {
    const int q = i / cells;
    if (i % cells == 0 && q > 0 && q < parts) {
      out[0] = q - 1;
      out[1] = q;
      return 2;
    }
    out[0] = q < parts ? q : parts - 1;
    return 1;
  };
  neigh_ptr_.assign(n_int + 1, 0);
  for (int j = 1; j < mesh.ny(); ++j) {
    for (int i = 1; i < mesh.nx(); ++i) {
      int ox[2], oy[2];
      const int cx = owners(i, cells_x_, px, ox);
      const int cy = owners(j, cells_y_, py, oy);
      neigh_ptr_[mesh.interior_index(i, j) + 1] = cx * cy;
    }
  }
  for (int d = 0; d < n_int; ++d) neigh_ptr_[d + 1] += neigh_ptr_[d];
  neigh_idx_.resize(neigh_ptr_[n_int]);
  for (int j = 1; j < mesh.ny(); ++j) {
    for (int i = 1; i < mesh.nx(); ++i) {
      int ox[2], oy[2];
      const int cx = owners(i, cells_x_, px, ox);
      const int cy = owners(j, cells_y_, py, oy);
      int pos = neigh_ptr_[mesh.interior_index(i, j)];
      for (int b = 0; b < cy; ++b)
        for (int a = 0; a < cx; ++a) neigh_idx_[pos++] = oy[b] * px + ox[a];  // sorted: y-major then x
    }
  }

  spatial_.resize(px * py);
  for (int sy = 0; sy < py; ++sy) {
    for (int sx = 0; sx < px; ++sx) {
      SpatialSubdomain& s = spatial_[sy * px + sx];
      s.index = sy * px + sx;
      s.sx = sx;
      s.sy = sy;
      s.cell_i0 = sx * cells_x_;
      s.cell_j0 = sy * cells_y_;
      s.local_of_global.assign(n_int, -1);
      for (int j = s.cell_j0; j <= s.cell_j0 + cells_y_; ++j) {
        for (int i = s.cell_i0; i <= s.cell_i0 + cells_x_; ++i) {
          const int dof = mesh.interior_index(i, j);
          if (dof < 0) continue;
          s.local_of_global[dof] = static_cast<int>(s.dofs.size());
          s.dofs.push_back(dof);
          const int wx = (i == s.cell_i0 || i == s.cell_i0 + cells_x_) ? 1 : 2;
          const int wy = (j == s.cell_j0 || j == s.cell_j0 + cells_y_) ? 1 : 2;
          s.cells_at_node.push_back(wx * wy);
        }
      }
    }
  }
}

LocalLayout local_layout(const SpaceTimePartition& p, int omega, int layer) {
  LocalLayout l;
  l.omega = omega;
  l.layer = layer;
  l.first_in_time = layer == 0;
  l.last_in_time = layer == p.pt() - 1;
  l.first_step = l.first_in_time ? 1 : 0;
  l.last_step = p.steps_per_slab();
  l.nodes = p.spatial(omega).num_local();
  return l;
}

}  // namespace stbddc
