#include "stbddc/fem/mesh.hpp"

#include <cmath>
#include <string>

namespace stbddc {

SpaceTimeMesh::SpaceTimeMesh(double length_x, double length_y, int nx, int ny, double final_time,
                             int num_steps)
    : length_x_(length_x),
      length_y_(length_y),
      nx_(nx),
      ny_(ny),
      num_steps_(num_steps),
      final_time_(final_time) {
  require(nx >= 1 && ny >= 1 && num_steps >= 1, ErrorCode::kInvalidArgument,
          "SpaceTimeMesh: cell and step counts must be positive");
  require(length_x > 0.0 && length_y > 0.0, ErrorCode::kNonPositiveCellSize,
          "SpaceTimeMesh: domain extents must be positive");
  require(final_time > 0.0, ErrorCode::kInvalidArgument, "SpaceTimeMesh: final time must be positive");
  h_ = length_x / nx;
  const double hy = length_y / ny;
  require(std::abs(h_ - hy) <= 1e-12 * h_, ErrorCode::kInvalidArgument,
          "SpaceTimeMesh: cells must be square (hx=" + std::to_string(h_) + ", hy=" + std::to_string(hy) + ")");
  dt_ = final_time / num_steps;
}

}  // namespace stbddc
