#pragma once

#include "stbddc/core/error.hpp"

namespace stbddc {

/// Structured grid of square Q1 cells on [0, length_x] x [0, length_y] with a
/// uniform time grid t_k = k * dt, k = 0..num_steps. Every node on the
/// boundary of the rectangle is a Dirichlet node.
///
/// Interior node (i, j), 1 <= i < nx, 1 <= j < ny, has DOF index
/// (j - 1) * (nx - 1) + (i - 1). Space-time vectors are step-major:
/// entry (k - 1) * num_interior() + dof for k = 1..num_steps.
class SpaceTimeMesh {
 public:
  SpaceTimeMesh() = default;
  SpaceTimeMesh(double length_x, double length_y, int nx, int ny, double final_time, int num_steps);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int num_steps() const { return num_steps_; }
  double length_x() const { return length_x_; }
  double length_y() const { return length_y_; }
  double h() const { return h_; }
  double dt() const { return dt_; }
  double final_time() const { return final_time_; }

  int num_nodes() const { return (nx_ + 1) * (ny_ + 1); }
  int num_cells() const { return nx_ * ny_; }
  int num_interior() const { return (nx_ - 1) * (ny_ - 1); }
  long long num_spacetime_dofs() const { return static_cast<long long>(num_interior()) * num_steps_; }

  int node(int i, int j) const { return j * (nx_ + 1) + i; }
  int cell(int ci, int cj) const { return cj * nx_ + ci; }
  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == nx_ || j == ny_; }
  /// -1 for boundary nodes.
  int interior_index(int i, int j) const {
    return on_boundary(i, j) ? -1 : (j - 1) * (nx_ - 1) + (i - 1);
  }
  /// Counter-clockwise from the lower-left corner.
  void cell_nodes(int ci, int cj, int out[4]) const {
    out[0] = node(ci, cj);
    out[1] = node(ci + 1, cj);
    out[2] = node(ci + 1, cj + 1);
    out[3] = node(ci, cj + 1);
  }

  double x(int i) const { return i * h_; }
  double y(int j) const { return j * h_; }
  double t(int k) const { return k * dt_; }

 private:
  double length_x_ = 0.0, length_y_ = 0.0;
  int nx_ = 0, ny_ = 0, num_steps_ = 0;
  double h_ = 0.0, dt_ = 0.0, final_time_ = 0.0;
};

}  // namespace stbddc
