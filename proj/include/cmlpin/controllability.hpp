#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cmlpin/linearize.hpp"

namespace cmlpin {

/// [B | AB | ... | A^{n-1} B].
Matrix ctrb_matrix(const Matrix& A, const Matrix& B);
int ctrb_rank(const Matrix& A, const Matrix& B);

/// phi(to, from) = A_{to-1} ... A_{from}; identity for an empty product.
/// a_seq[k] is the matrix applied at time k.
Matrix transition(std::span<const Matrix> a_seq, int from, int to);

/// Covariance of the noise-driven residual d = x_{h} - phi(h, 0) x_0 for
/// sequences starting at t = 0:
///   sum_{j=1}^{h} phi(h, j) E_{j-1} Sigma_{j-1} E_{j-1}^T phi(h, j)^T
Matrix residual_covariance(std::span<const Matrix> a_seq, std::span<const Matrix> e_seq,
                           std::span<const Matrix> sigma_seq, int horizon);

/// Stationary overload.
Matrix residual_covariance(const Matrix& A, const Matrix& E, const Matrix& sigma, int horizon);

struct ControllabilityReport {
  std::optional<int> det_rank;
  std::optional<bool> det_controllable;
  Matrix psi;                            // residual covariance at horizon n
  std::vector<double> psi_norm_sequence;  // spectral norms, k = 1..max_horizon
  bool psi_pd = false;
  bool psi_bounded = false;
  int sc_rank = 0;  // rank of [E | phi E | ... | phi^{n-1} E]
  bool stochastically_controllable = false;
};

/// Stationary stochastic controllability. Boundedness means the increments
/// of ||Psi_k|| fall below bound_tol before max_horizon.
ControllabilityReport stochastic_ctrb_verdict(const Matrix& A, const Matrix& E, const Matrix& sigma,
                                              int max_horizon, double bound_tol);

/// Stochastic verdict plus the deterministic rank of (A, B).
ControllabilityReport analyze_controllability(const LinearModel& model, int max_horizon, double bound_tol);

}  // namespace cmlpin
