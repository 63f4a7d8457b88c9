#pragma once

#include <string>
#include <vector>

#include "stbddc/dd/subdomain_operator.hpp"

namespace stbddc {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Test-only hooks for mutation checks.
struct VerifyHooks {
  PerturbationSigns signs;
};

// Each check builds its own fixed instance; `seed` only drives random inputs.

/// Sum of perturbed local applications vs. the monolithic operator, 12x12 grid,
/// K = 8, 2x2x2 partition, 100 random vectors.
PropertyResult check_assembly_equivalence(unsigned seed, const VerifyHooks& hooks = {}, int vectors = 100);
/// u.(A_i u) > 0 on every subdomain of a 3x3x3 partition (6x6x4 local grids).
PropertyResult check_positivity(unsigned seed, int vectors_per_subdomain = 1000);
/// Global A(u, u) against the sum of jump, stiffness and final-mass terms.
PropertyResult check_energy_identity(unsigned seed, int vectors = 20);
/// 1x1x1 partition: GMRES stops after one iteration.
PropertyResult check_single_subdomain(unsigned seed);
/// STBDDC-GMRES against a sparse LU of the space-time matrix, 30x30 grid,
/// K = 20, 3x3x2 partition.
PropertyResult check_oracle_equivalence(unsigned seed);
/// C Phi = I, C Psi = I, Psi^T A Phi = -Lambda on every subdomain of the
/// oracle instance.
PropertyResult check_coarse_basis(unsigned seed);

std::vector<PropertyResult> verify_suite(unsigned seed, const VerifyHooks& hooks = {});

}  // namespace stbddc
