#pragma once

#include <vector>

#include "cmlpin/linalg.hpp"

namespace cmlpin {

/// Coupled map lattice configuration. Pin sites are 1-based.
struct LatticeParams {
  double a = 3.0;
  double epsilon = 0.33;
  int length = 5;
  std::vector<int> pin_sites{1, 5};

  int num_pins() const { return static_cast<int>(pin_sites.size()); }

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// Checks that pins are distinct and lie in 1..length.
void validate_pins(int length, const std::vector<int>& pin_sites);

constexpr double logistic_map(double z, double a) { return a * z * (1.0 - z); }

/// Homogeneous steady state z* = 1 - 1/a. Requires a > 1.
double fixed_point(double a);

/// One step of the lattice:
///   z'_i = f((1-2e) z_i + e (z_{i-1} + z_{i+1})) + sum_m [i == i_m] u_m + noise_i
/// with periodic boundaries. No clipping is applied.
Vector step(const Vector& state, const LatticeParams& params, const Vector& controls, const Vector& noise);

/// Uncontrolled, noiseless step.
Vector step(const Vector& state, const LatticeParams& params);

}  // namespace cmlpin
