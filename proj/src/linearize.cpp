#include "cmlpin/linearize.hpp"

#include <stdexcept>

namespace cmlpin {

void LinearModel::validate_shapes() const {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || Sigma.rows() != E.cols() || Sigma.cols() != Sigma.rows() ||
      E.rows() != n)
    throw std::invalid_argument("linear model: inconsistent dimensions");
}

void LinearModel::validate() const {
  validate_shapes();
  if (!is_spd(Sigma)) throw std::invalid_argument("linear model: Sigma must be symmetric positive definite");
}

double map_slope_at_fixed_point(double a) { return 2.0 - a; }

Matrix jacobian(const LatticeParams& params) {
  fixed_point(params.a);  // rejects a <= 1
  const int n = params.length;
  const double alpha = map_slope_at_fixed_point(params.a);
  const double e = params.epsilon;
  Matrix j = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    j(i, i) += alpha * (1.0 - 2.0 * e);
    j(i, (i + n - 1) % n) += alpha * e;
    j(i, (i + 1) % n) += alpha * e;
  }
  return j;
}

Matrix pin_matrix(int length, const std::vector<int>& pin_sites) {
  validate_pins(length, pin_sites);
  Matrix b = Matrix::Zero(length, static_cast<Eigen::Index>(pin_sites.size()));
  for (std::size_t m = 0; m < pin_sites.size(); ++m) b(pin_sites[m] - 1, static_cast<Eigen::Index>(m)) = 1.0;
  return b;
}

LinearModel linearized_model(const LatticeParams& params, const Matrix& sigma) {
  params.validate();
  LinearModel model{jacobian(params), pin_matrix(params.length, params.pin_sites), sigma,
                    Matrix::Identity(params.length, params.length)};
  model.validate_shapes();
  return model;
}

}  // namespace cmlpin
