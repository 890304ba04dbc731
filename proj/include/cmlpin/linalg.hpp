#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace cmlpin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical rank: singular values below max(rows, cols) * sigma_max * 2^-40
/// are treated as zero.
int numerical_rank(const Matrix& m);

/// Symmetric PSD square root via eigendecomposition. Negative eigenvalues
/// from rounding are clamped to zero.
Matrix sym_sqrt(const Matrix& s);

/// Inverse of a symmetric positive definite matrix through its LLT factor.
/// Throws std::invalid_argument if the matrix is not SPD.
Matrix spd_inverse(const Matrix& s);

bool is_symmetric(const Matrix& m, double tol = 1e-12);
bool is_spd(const Matrix& m);
bool is_psd(const Matrix& m, double tol = 1e-12);

double min_eigenvalue_sym(const Matrix& m);
double spectral_norm(const Matrix& m);

std::vector<std::complex<double>> eigenvalues(const Matrix& m);
double spectral_radius(const Matrix& m);

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Stationary covariance P = F P F^T + Q by fixed-point iteration.
/// Requires spectral_radius(F) < 1.
Matrix stationary_covariance(const Matrix& f, const Matrix& q, double tol = 1e-14, int max_iter = 1000000);

}  // namespace cmlpin
