#pragma once

#include <vector>

#include "cmlpin/lattice.hpp"
#include "cmlpin/linalg.hpp"

namespace cmlpin {

/// Stochastic linear model x' = A x + B u + E k, k ~ N(0, Sigma).
struct LinearModel {
  Matrix A;
  Matrix B;
  Matrix Sigma;
  Matrix E;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }

  /// Dimension checks only.
  void validate_shapes() const;
  /// Dimension checks plus symmetric positive definite Sigma.
  void validate() const;
};

/// f'(z*) = 2 - a for the logistic map.
double map_slope_at_fixed_point(double a);

/// Circulant Jacobian about z* 1: diagonal alpha(1-2e), circular neighbours
/// alpha*e. For length 2 both neighbours are the same site and accumulate.
Matrix jacobian(const LatticeParams& params);

/// L x M selector with B(i_m - 1, m) = 1.
Matrix pin_matrix(int length, const std::vector<int>& pin_sites);

/// (jacobian, pin_matrix, sigma, I).
LinearModel linearized_model(const LatticeParams& params, const Matrix& sigma);

}  // namespace cmlpin
