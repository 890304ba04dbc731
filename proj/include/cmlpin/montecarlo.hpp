#pragma once

#include <cstdint>

#include "cmlpin/linearize.hpp"

namespace cmlpin {

/// Execution policy for the Monte-Carlo kernels. Both paths draw sample i
/// from stream (seed, i) and reduce in index order, so they return
/// bit-identical results.
enum class Exec { serial, parallel };

/// Residuals d = x_h - A^h x_0 of the open-loop stationary model, one per
/// column. x_0 is standard normal; noise enters through E with covariance
/// Sigma.
Matrix sample_residuals(const LinearModel& model, int horizon, long samples, std::uint64_t seed, Exec exec);

/// Unbiased sample covariance of the columns.
Matrix sample_covariance(const Matrix& columns);

Matrix empirical_residual_covariance(const LinearModel& model, int horizon, long samples, std::uint64_t seed,
                                     Exec exec);

}  // namespace cmlpin
