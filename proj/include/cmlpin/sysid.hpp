#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "cmlpin/lattice.hpp"
#include "cmlpin/linearize.hpp"

namespace cmlpin {

struct Record {
  Vector x;
  Vector u;
  Vector x_next;
};

struct Dataset {
  Eigen::Index state_dim = 0;
  Eigen::Index input_dim = 0;
  std::vector<Record> records;

  std::size_t size() const { return records.size(); }
  void validate() const;
};

struct FitOptions {
  // Replace Sigma by the diagonal of the residual covariance.
  bool diagonal_sigma = true;
};

struct FitResult {
  LinearModel model;  // Sigma is diagonal or full per FitOptions
  Matrix sigma_full;  // always the full residual covariance
  Matrix residuals;   // state_dim x N, column t is x_{t+1} - A x_t - B u_t
};

/// Multivariate least squares of x_{t+1} on [x_t; u_t], no intercept. The
/// residual covariance uses the 1/N normalisation. Throws
/// IdentifiabilityError when the stacked regressor is rank deficient.
FitResult fit_linear_model(const Dataset& data, const FitOptions& options = {});

/// Nonlinear lattice with additive Gaussian site noise. Records are taken
/// in deviation coordinates x = z - z*.
struct NonlinearPlant {
  LatticeParams params;
  Matrix noise_cov;
};

using Plant = std::variant<NonlinearPlant, LinearModel>;

struct ExcitationPolicy {
  double input_std = 0.1;
  // Restart from a fresh initial state every episode_length steps (0: never).
  int episode_length = 0;
  double initial_std = 0.0;
  // Optional M x L stabilising feedback added to the white-noise input.
  Matrix feedback;
  double divergence_bound = 1e6;
};

/// Rolls the plant under u_t = K x_t + white noise, recording n
/// transitions. Deterministic given seed. Throws DivergenceError with the
/// step index if the state leaves divergence_bound.
Dataset excite_and_collect(const Plant& plant, const ExcitationPolicy& policy, long n, std::uint64_t seed);

/// CSV with header t,x1..xL,u1..uM,xnext1..xnextL.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace cmlpin
