#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cmlpin/linearize.hpp"
#include "cmlpin/random.hpp"

namespace cmlpin {

struct RiccatiOptions {
  double tol = 1e-12;
  int max_iter = 10000;
};

struct RiccatiSolution {
  Matrix M;
  double residual = 0.0;
  int iterations = 0;
};

/// Right-hand side of the cost-matrix fixed point
///   A'S A + A'M A - (A'M B + A'S B)(B'M B + B'S B + G)^{-1}(B'M A + B'S A)
/// with S = Sigma^{-1}, G = Gamma^{-1}.
Matrix riccati_rhs(const LinearModel& model, const Matrix& gamma, const Matrix& m);

/// ||rhs(M) - M||_F / max(1, ||M||_F).
double riccati_residual(const LinearModel& model, const Matrix& gamma, const Matrix& m);

/// Fixed-point iteration from M = 0 with symmetrisation every step. Stops
/// when the relative step change drops below tol. Throws DesignError with
/// the last residual if max_iter is reached.
RiccatiSolution solve_riccati(const LinearModel& model, const Matrix& gamma, const RiccatiOptions& options = {});

/// C = -(B'M B + B'S B + G)^{-1}(B'M A + B'S A).
Matrix gain(const LinearModel& model, const Matrix& gamma, const Matrix& m);

struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  double radius = 0.0;
};

Spectrum closed_loop_spectrum(const Matrix& A, const Matrix& B, const Matrix& C);

/// [W; W A; ...; W A^{n-1}] with W the symmetric root of Sigma^{-1}.
Matrix as_matrix(const Matrix& sigma, const Matrix& A);
int as_rank(const Matrix& sigma, const Matrix& A);

/// x'[C'G C + (A+BC)'S (A+BC)] x.
double partial_cost(const Vector& x, const Matrix& C, const LinearModel& model, const Matrix& gamma);

/// x'[M - (A+BC)'M (A+BC)] x, the one-step decrease of the cost matrix.
double cost_decrease(const Vector& x, const Matrix& C, const Matrix& m, const LinearModel& model);

/// ||C'G C + (A+BC)'S(A+BC) + (A+BC)'M(A+BC) - M||_F / max(1, ||M||_F).
double lyapunov_residual(const Matrix& C, const Matrix& m, const LinearModel& model, const Matrix& gamma);

/// 0.5 x'M x. The additive constant of the cost-to-go has no closed form
/// and is reported as zero.
double cost_to_go(const Vector& x, const Matrix& m);

/// Draws u = C x + w, w ~ N(0, Gamma), through the symmetric root of Gamma.
class ControlSampler {
 public:
  ControlSampler(Matrix C, const Matrix& gamma, bool deterministic = false);

  Vector operator()(const Vector& x, NormalStream& rng) const;
  const Matrix& gain() const { return C_; }

 private:
  Matrix C_;
  Matrix gamma_root_;
  bool deterministic_;
};

Vector sample_control(const Matrix& C, const Vector& x, const Matrix& gamma, NormalStream& rng,
                      bool deterministic = false);

/// Expanded form of the cost-matrix identity as a function of an arbitrary
/// gain C:
///   A'S A + A'M A - M + C'(G + B'M B + B'S B)C + C'B'S A + A'S B C + C'B'M A + A'M B C
/// It vanishes at the optimal gain and equals dC' R dC away from it.
Matrix gain_identity_form(const Matrix& C, const Matrix& m, const LinearModel& model, const Matrix& gamma);

/// Completed square {R^{1/2} C + R^{-1/2} N}'{R^{1/2} C + R^{-1/2} N} with
/// R = G + B'M B + B'S B and N = B'M A + B'S A. PSD for every C, zero at the
/// optimal gain.
Matrix completed_square(const Matrix& C, const Matrix& m, const LinearModel& model, const Matrix& gamma);

struct OptimalityOptions {
  int trials = 100;
  double perturbation_norm = 0.01;
  // Relative to max(1, ||M||_F).
  double tolerance = 1e-10;
  std::uint64_t seed = 7;
};

/// Perturbs C* by random dC of fixed Frobenius norm and checks that
/// gain_identity_form(C* + dC) never drops below gain_identity_form(C*) in
/// any direction (minimum eigenvalue of the difference >= -tolerance).
bool optimality_check(const Matrix& c_star, const Matrix& m, const LinearModel& model, const Matrix& gamma,
                      const OptimalityOptions& options = {});

struct GainSolution {
  Matrix C;
  Matrix Mcost;
  Matrix Gamma;
  double riccati_residual = 0.0;
  double lyapunov_residual = 0.0;
  int iterations = 0;
  Spectrum spectrum;
  int as_rank = 0;

  double spectral_radius() const { return spectrum.radius; }
  bool stabilizing() const { return spectrum.radius < 1.0; }
};

/// solve_riccati + gain + diagnostics.
GainSolution design(const LinearModel& model, const Matrix& gamma, const RiccatiOptions& options = {});

}  // namespace cmlpin
