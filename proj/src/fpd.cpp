#include "cmlpin/fpd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cmlpin/errors.hpp"

namespace cmlpin {

namespace {

// Quantities shared by every formula of the design.
struct Weights {
  Matrix sigma_inv;
  Matrix gamma_inv;
};

Weights weights(const LinearModel& model, const Matrix& gamma) {
  model.validate();
  if (gamma.rows() != model.inputs() || !is_spd(gamma))
    throw std::invalid_argument("Gamma must be an M x M symmetric positive definite matrix");
  return {spd_inverse(model.Sigma), spd_inverse(gamma)};
}

// R = B'M B + B'S B + G, N = B'M A + B'S A.
struct Blocks {
  Matrix R;
  Matrix N;
};

Blocks blocks(const LinearModel& model, const Weights& w, const Matrix& m) {
  const Matrix& A = model.A;
  const Matrix& B = model.B;
  const Matrix mw = m + w.sigma_inv;
  return {symmetrize(B.transpose() * mw * B + w.gamma_inv), B.transpose() * mw * A};
}

Matrix rhs(const LinearModel& model, const Weights& w, const Matrix& m) {
  const Matrix& A = model.A;
  const auto [R, N] = blocks(model, w, m);
  Eigen::LLT<Matrix> llt(R);
  if (llt.info() != Eigen::Success) throw DesignError("inner matrix B'MB + B'S B + G is not positive definite");
  return A.transpose() * (m + w.sigma_inv) * A - N.transpose() * llt.solve(N);
}

double relative(double abs_err, const Matrix& m) { return abs_err / std::max(1.0, m.norm()); }

}  // namespace

Matrix riccati_rhs(const LinearModel& model, const Matrix& gamma, const Matrix& m) {
  return rhs(model, weights(model, gamma), m);
}

double riccati_residual(const LinearModel& model, const Matrix& gamma, const Matrix& m) {
  return relative((riccati_rhs(model, gamma, m) - m).norm(), m);
}

RiccatiSolution solve_riccati(const LinearModel& model, const Matrix& gamma, const RiccatiOptions& options) {
  const Weights w = weights(model, gamma);
  const auto n = model.states();
  RiccatiSolution sol{Matrix::Zero(n, n), 0.0, 0};
  double change = 0.0;
  for (int k = 1; k <= options.max_iter; ++k) {
    Matrix next = symmetrize(rhs(model, w, sol.M));
    if (!next.allFinite()) {
      std::ostringstream msg;
      msg << "Riccati iteration overflowed at iteration " << k;
      throw DesignError(msg.str());
    }
    change = relative((next - sol.M).norm(), next);
    sol.M = std::move(next);
    sol.iterations = k;
    if (change < options.tol) {
      sol.residual = relative((symmetrize(rhs(model, w, sol.M)) - sol.M).norm(), sol.M);
      return sol;
    }
  }
  std::ostringstream msg;
  msg << "Riccati iteration did not converge in " << options.max_iter << " iterations (last residual " << change
      << ")";
  throw DesignError(msg.str());
}

Matrix gain(const LinearModel& model, const Matrix& gamma, const Matrix& m) {
  const Weights w = weights(model, gamma);
  const auto [R, N] = blocks(model, w, m);
  Eigen::LLT<Matrix> llt(R);
  if (llt.info() != Eigen::Success) throw DesignError("gain: inner matrix is singular");
  return -llt.solve(N);
}

Spectrum closed_loop_spectrum(const Matrix& A, const Matrix& B, const Matrix& C) {
  if (B.rows() != A.rows() || C.rows() != B.cols() || C.cols() != A.cols())
    throw std::invalid_argument("closed_loop_spectrum: inconsistent dimensions");
  Spectrum s;
  s.eigenvalues = eigenvalues(A + B * C);
  for (const auto& e : s.eigenvalues) s.radius = std::max(s.radius, std::abs(e));
  return s;
}

Matrix as_matrix(const Matrix& sigma, const Matrix& A) {
  if (!is_spd(sigma)) throw std::invalid_argument("as_matrix: Sigma must be symmetric positive definite");
  if (A.rows() != sigma.rows() || A.cols() != A.rows()) throw std::invalid_argument("as_matrix: dimension mismatch");
  const auto n = A.rows();
  const Matrix w = sym_sqrt(spd_inverse(sigma)).transpose();
  Matrix stacked(n * n, n);
  Matrix block = w;
  for (Eigen::Index i = 0; i < n; ++i) {
    stacked.middleRows(i * n, n) = block;
    block = block * A;
  }
  return stacked;
}

int as_rank(const Matrix& sigma, const Matrix& A) { return numerical_rank(as_matrix(sigma, A)); }

double partial_cost(const Vector& x, const Matrix& C, const LinearModel& model, const Matrix& gamma) {
  const Weights w = weights(model, gamma);
  const Vector u = C * x;
  const Vector y = model.A * x + model.B * u;
  return u.dot(w.gamma_inv * u) + y.dot(w.sigma_inv * y);
}

double cost_decrease(const Vector& x, const Matrix& C, const Matrix& m, const LinearModel& model) {
  const Vector y = (model.A + model.B * C) * x;
  return x.dot(m * x) - y.dot(m * y);
}

double lyapunov_residual(const Matrix& C, const Matrix& m, const LinearModel& model, const Matrix& gamma) {
  const Weights w = weights(model, gamma);
  const Matrix f = model.A + model.B * C;
  const Matrix lhs = C.transpose() * w.gamma_inv * C + f.transpose() * w.sigma_inv * f + f.transpose() * m * f - m;
  return relative(lhs.norm(), m);
}

double cost_to_go(const Vector& x, const Matrix& m) { return 0.5 * x.dot(m * x); }

ControlSampler::ControlSampler(Matrix C, const Matrix& gamma, bool deterministic)
    : C_(std::move(C)), deterministic_(deterministic) {
  if (!deterministic_) {
    if (!is_spd(gamma) || gamma.rows() != C_.rows())
      throw std::invalid_argument("controller covariance must be M x M symmetric positive definite");
    gamma_root_ = sym_sqrt(gamma);
  }
}

Vector ControlSampler::operator()(const Vector& x, NormalStream& rng) const {
  Vector u = C_ * x;
  if (!deterministic_) u += rng.gaussian(gamma_root_);
  return u;
}

Vector sample_control(const Matrix& C, const Vector& x, const Matrix& gamma, NormalStream& rng, bool deterministic) {
  return ControlSampler(C, gamma, deterministic)(x, rng);
}

Matrix gain_identity_form(const Matrix& C, const Matrix& m, const LinearModel& model, const Matrix& gamma) {
  const Weights w = weights(model, gamma);
  const Matrix& A = model.A;
  const Matrix& B = model.B;
  const Matrix& S = w.sigma_inv;
  const Matrix r = w.gamma_inv + B.transpose() * m * B + B.transpose() * S * B;
  Matrix g = A.transpose() * S * A + A.transpose() * m * A - m + C.transpose() * r * C;
  g += C.transpose() * B.transpose() * S * A + A.transpose() * S * B * C;
  g += C.transpose() * B.transpose() * m * A + A.transpose() * m * B * C;
  return symmetrize(g);
}

Matrix completed_square(const Matrix& C, const Matrix& m, const LinearModel& model, const Matrix& gamma) {
  const Weights w = weights(model, gamma);
  const auto [R, N] = blocks(model, w, m);
  const Matrix root = sym_sqrt(R);
  const Matrix inv_root = sym_sqrt(spd_inverse(R));
  const Matrix k = root * C + inv_root * N;
  return k.transpose() * k;
}

bool optimality_check(const Matrix& c_star, const Matrix& m, const LinearModel& model, const Matrix& gamma,
                      const OptimalityOptions& options) {
  const Matrix base = gain_identity_form(c_star, m, model, gamma);
  const double tol = options.tolerance * std::max(1.0, m.norm());
  NormalStream rng(options.seed);
  for (int trial = 0; trial < options.trials; ++trial) {
    Matrix dc(c_star.rows(), c_star.cols());
    for (Eigen::Index i = 0; i < dc.size(); ++i) dc.data()[i] = rng.normal();
    if (options.perturbation_norm > 0.0) dc *= options.perturbation_norm / dc.norm();
    else dc.setZero();
    const Matrix diff = gain_identity_form(c_star + dc, m, model, gamma) - base;
    if (min_eigenvalue_sym(diff) < -tol) return false;
  }
  return true;
}

GainSolution design(const LinearModel& model, const Matrix& gamma, const RiccatiOptions& options) {
  const auto ric = solve_riccati(model, gamma, options);
  GainSolution sol;
  sol.Mcost = ric.M;
  sol.Gamma = gamma;
  sol.iterations = ric.iterations;
  sol.riccati_residual = ric.residual;
  sol.C = gain(model, gamma, ric.M);
  sol.lyapunov_residual = lyapunov_residual(sol.C, sol.Mcost, model, gamma);
  sol.spectrum = closed_loop_spectrum(model.A, model.B, sol.C);
  sol.as_rank = as_rank(model.Sigma, model.A);
  return sol;
}

}  // namespace cmlpin
