#include "cmlpin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmlpin {

int numerical_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double threshold = static_cast<double>(std::max(m.rows(), m.cols())) * s(0) * std::ldexp(1.0, -40);
  return static_cast<int>((s.array() > threshold).count());
}

Matrix sym_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s));
  Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

Matrix spd_inverse(const Matrix& s) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("matrix is not symmetric positive definite");
  return symmetrize(llt.solve(Matrix::Identity(s.rows(), s.cols())));
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

bool is_spd(const Matrix& m) {
  if (m.rows() == 0 || !is_symmetric(m)) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

bool is_psd(const Matrix& m, double tol) {
  if (!is_symmetric(m)) return false;
  if (m.rows() == 0) return true;
  return min_eigenvalue_sym(m) >= -tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

double min_eigenvalue_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  const auto& ev = es.eigenvalues();
  std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
  // Stable order for reports: by modulus, then argument.
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    if (std::abs(l) != std::abs(r)) return std::abs(l) > std::abs(r);
    return std::arg(l) < std::arg(r);
  });
  return out;
}

double spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const auto& e : eigenvalues(m)) r = std::max(r, std::abs(e));
  return r;
}

Matrix stationary_covariance(const Matrix& f, const Matrix& q, double tol, int max_iter) {
  if (spectral_radius(f) >= 1.0) throw std::invalid_argument("stationary covariance needs a stable matrix");
  // Doubling: P_{2k} = P_k + F_k P_k F_k', F_{2k} = F_k^2.
  Matrix p = q;
  Matrix fk = f;
  for (int i = 0; i < max_iter; ++i) {
    Matrix next = p + fk * p * fk.transpose();
    const double change = (next - p).norm();
    p = symmetrize(next);
    fk = fk * fk;
    if (change <= tol * std::max(1.0, p.norm())) break;
  }
  return p;
}

}  // namespace cmlpin
