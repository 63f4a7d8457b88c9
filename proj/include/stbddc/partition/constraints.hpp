#pragma once

#include <string>
#include <vector>

#include "stbddc/core/sparse_matrix.hpp"
#include "stbddc/partition/partition.hpp"

namespace stbddc {

enum class ObjectKind { kCorner = 0, kEdge = 1 };

/// Connected set of interface DOFs sharing one neighbor set.
struct GeometricObject {
  ObjectKind kind = ObjectKind::kCorner;
  std::vector<int> neigh;        // sorted spatial subdomain indices
  std::vector<int> dofs;         // global interior DOFs, sorted
  std::vector<double> weights;   // quadrature weight per DOF (1 for a corner, h along an edge)
};

/// Deterministic order: corners before edges, then by neighbor set, then by
/// first DOF. Dirichlet nodes never appear.
std::vector<GeometricObject> classify_objects(const SpaceTimePartition& p);

enum class CoarseVariant { kCorners, kCornersEdges };

enum class ConstraintKind {
  kSpaceAverage,         // object average, summed over the time-interior steps of a slab
  kTimeInterfaceMean,    // mean over the spatial subdomain at a time interface
  kTimeInterfaceObject,  // object average at a time interface
};

enum class ConstraintMode {
  kSpaceTime,
  kSpaceOnly,  // object averages at every local step; for single-step problems
};

struct SubdomainConstraints {
  LocalLayout layout;
  SparseMatrix c;  // rows x layout.size()
  std::vector<int> global_ids;
  std::vector<ConstraintKind> kinds;
  int rows() const { return c.rows(); }
};

struct CoarseSpace {
  std::vector<GeometricObject> objects;  // objects used (after variant filtering)
  std::vector<SubdomainConstraints> subdomains;  // indexed by subdomain_id()
  int num_global = 0;
  int dropped_rows = 0;  // space-average rows with an empty time sum (K_n = 1)
  std::vector<std::string> log;
};

CoarseSpace build_constraints(const SpaceTimePartition& p, CoarseVariant variant, ConstraintMode mode);

}  // namespace stbddc
