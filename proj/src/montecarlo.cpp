#include "cmlpin/montecarlo.hpp"

#include <stdexcept>

#include "cmlpin/random.hpp"

namespace cmlpin {

namespace {

Vector one_residual(const LinearModel& model, const Matrix& a_pow, const Matrix& noise_root, int horizon,
                    std::uint64_t seed, long index) {
  NormalStream rng(seed, static_cast<std::uint64_t>(index));
  const Vector x0 = rng.normal_vector(model.states());
  Vector x = x0;
  for (int k = 0; k < horizon; ++k) x = model.A * x + model.E * rng.gaussian(noise_root);
  return x - a_pow * x0;
}

}  // namespace

Matrix sample_residuals(const LinearModel& model, int horizon, long samples, std::uint64_t seed, Exec exec) {
  model.validate_shapes();
  if (horizon < 1 || samples < 1) throw std::invalid_argument("sample_residuals: horizon and samples must be >= 1");
  const Matrix a_pow = [&] {
    Matrix p = Matrix::Identity(model.states(), model.states());
    for (int k = 0; k < horizon; ++k) p = model.A * p;
    return p;
  }();
  const Matrix noise_root = sym_sqrt(model.Sigma);
  Matrix d(model.states(), samples);

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < samples; ++i) d.col(i) = one_residual(model, a_pow, noise_root, horizon, seed, i);
  } else {
    for (long i = 0; i < samples; ++i) d.col(i) = one_residual(model, a_pow, noise_root, horizon, seed, i);
  }
  return d;
}

Matrix sample_covariance(const Matrix& columns) {
  const auto n = columns.cols();
  if (n < 2) throw std::invalid_argument("sample_covariance: need at least two samples");
  const Vector mean = columns.rowwise().mean();
  const Matrix centered = columns.colwise() - mean;
  return symmetrize(centered * centered.transpose() / static_cast<double>(n - 1));
}

Matrix empirical_residual_covariance(const LinearModel& model, int horizon, long samples, std::uint64_t seed,
                                     Exec exec) {
  return sample_covariance(sample_residuals(model, horizon, samples, seed, exec));
}

}  // namespace cmlpin
