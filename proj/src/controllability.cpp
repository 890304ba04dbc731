#include "cmlpin/controllability.hpp"

#include <cmath>
#include <stdexcept>

namespace cmlpin {

Matrix ctrb_matrix(const Matrix& A, const Matrix& B) {
  if (A.rows() != A.cols() || B.rows() != A.rows()) throw std::invalid_argument("ctrb: inconsistent dimensions");
  const auto n = A.rows();
  const auto m = B.cols();
  Matrix k(n, n * m);
  Matrix block = B;
  for (Eigen::Index i = 0; i < n; ++i) {
    k.middleCols(i * m, m) = block;
    block = A * block;
  }
  return k;
}

int ctrb_rank(const Matrix& A, const Matrix& B) { return numerical_rank(ctrb_matrix(A, B)); }

Matrix transition(std::span<const Matrix> a_seq, int from, int to) {
  if (to < from) throw std::invalid_argument("transition: to < from");
  if (from < 0 || static_cast<std::size_t>(to) > a_seq.size())
    throw std::out_of_range("transition: sequence does not cover [from, to)");
  if (from == to) {
    if (a_seq.empty()) throw std::out_of_range("transition: empty sequence has no dimension");
    const auto n = a_seq.front().rows();
    return Matrix::Identity(n, n);
  }
  Matrix phi = a_seq[from];
  for (int k = from + 1; k < to; ++k) phi = a_seq[k] * phi;
  return phi;
}

Matrix residual_covariance(std::span<const Matrix> a_seq, std::span<const Matrix> e_seq,
                           std::span<const Matrix> sigma_seq, int horizon) {
  if (horizon < 0 || a_seq.size() < static_cast<std::size_t>(horizon) ||
      e_seq.size() < static_cast<std::size_t>(horizon) || sigma_seq.size() < static_cast<std::size_t>(horizon))
    throw std::invalid_argument("residual_covariance: sequences do not cover the horizon");
  if (a_seq.empty()) throw std::invalid_argument("residual_covariance: empty sequence");
  const auto n = a_seq.front().rows();
  Matrix psi = Matrix::Zero(n, n);
  // Accumulate backwards so phi(h, j) is built incrementally.
  Matrix phi = Matrix::Identity(n, n);
  for (int j = horizon; j >= 1; --j) {
    const Matrix& e = e_seq[j - 1];
    const Matrix& s = sigma_seq[j - 1];
    if (e.rows() != n || e.cols() != s.rows() || s.rows() != s.cols() || a_seq[j - 1].rows() != n)
      throw std::invalid_argument("residual_covariance: dimension mismatch");
    const Matrix g = phi * e;
    psi += g * s * g.transpose();
    phi = phi * a_seq[j - 1];
  }
  return symmetrize(psi);
}

Matrix residual_covariance(const Matrix& A, const Matrix& E, const Matrix& sigma, int horizon) {
  std::vector<Matrix> a(horizon, A), e(horizon, E), s(horizon, sigma);
  if (horizon == 0) {
    a.push_back(A);
    e.push_back(E);
    s.push_back(sigma);
  }
  return residual_covariance(a, e, s, horizon);
}

ControllabilityReport stochastic_ctrb_verdict(const Matrix& A, const Matrix& E, const Matrix& sigma,
                                              int max_horizon, double bound_tol) {
  const auto n = A.rows();
  ControllabilityReport report;

  // Psi_k = sum_{j<k} A^j Q A^j', Q = E Sigma E'.
  const Matrix q = E * sigma * E.transpose();
  Matrix psi = Matrix::Zero(n, n);
  Matrix term = q;
  for (int k = 1; k <= max_horizon; ++k) {
    psi += term;
    term = A * term * A.transpose();
    report.psi_norm_sequence.push_back(spectral_norm(symmetrize(psi)));
    if (k == n) report.psi = symmetrize(psi);
  }
  if (report.psi.size() == 0) report.psi = residual_covariance(A, E, sigma, static_cast<int>(n));

  // Bounded: the geometric tail has flattened the norm sequence below
  // bound_tol (relative) by the last horizon.
  const auto& seq = report.psi_norm_sequence;
  if (seq.size() >= 2) {
    const double last = seq.back();
    report.psi_bounded = std::isfinite(last) && std::abs(last - seq[seq.size() - 2]) <= bound_tol * last;
  }

  report.psi_pd = is_spd(report.psi) && min_eigenvalue_sym(report.psi) > 0.0;
  report.sc_rank = numerical_rank(ctrb_matrix(A, E));
  report.stochastically_controllable = report.sc_rank == n && report.psi_bounded;
  return report;
}

ControllabilityReport analyze_controllability(const LinearModel& model, int max_horizon, double bound_tol) {
  model.validate_shapes();
  auto report = stochastic_ctrb_verdict(model.A, model.E, model.Sigma, max_horizon, bound_tol);
  report.det_rank = ctrb_rank(model.A, model.B);
  report.det_controllable = *report.det_rank == model.states();
  return report;
}

}  // namespace cmlpin
