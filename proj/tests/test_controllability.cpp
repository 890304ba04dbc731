#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cmlpin/controllability.hpp"
#include "cmlpin/montecarlo.hpp"

using namespace cmlpin;

namespace {

// Rank through full-pivot LU, independent of the SVD route in the library.
int lu_rank(const Matrix& a, const Matrix& b) {
  const auto n = a.rows();
  Matrix k(n, n * b.cols());
  Matrix p = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k.middleCols(i * b.cols(), b.cols()) = p * b;
    p = a * p;
  }
  Eigen::FullPivLU<Matrix> lu(k);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

Matrix random_matrix(std::mt19937_64& gen, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(r, c);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
  return m;
}

Matrix random_psd(std::mt19937_64& gen, int n) {
  const Matrix g = random_matrix(gen, n, n);
  return g * g.transpose() / n;
}

}  // namespace

TEST_CASE("deterministic controllability rank") {
  const Matrix a5 = jacobian({3.0, 0.33, 5, {1, 5}});
  const Matrix b5 = pin_matrix(5, {1, 5});
  CHECK(ctrb_matrix(a5, b5).cols() == 10);
  CHECK(lu_rank(a5, b5) == 5);
  CHECK(ctrb_rank(a5, b5) == 5);

  CHECK(ctrb_rank(Matrix::Identity(4, 4), pin_matrix(4, {1})) == 1);

  const Matrix a4 = jacobian({3.0, 0.33, 4, {1, 3}});
  const Matrix b4 = pin_matrix(4, {1, 3});
  CHECK(lu_rank(a4, b4) < 4);
  CHECK(ctrb_rank(a4, b4) == lu_rank(a4, b4));
}

TEST_CASE("pin spacing that divides the length loses a mode") {
  for (auto [n, pins] : {std::pair{4, std::vector<int>{1, 3}}, std::pair{6, std::vector<int>{1, 4}},
                         std::pair{8, std::vector<int>{1, 5}}}) {
    const Matrix a = jacobian({3.9, 0.3, n, pins});
    const Matrix b = pin_matrix(n, pins);
    CHECK(lu_rank(a, b) < n);
    CHECK(ctrb_rank(a, b) < n);
  }
}

TEST_CASE("rank is invariant under similarity") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 5;
    Matrix a = random_matrix(gen, n, n);
    Matrix b = random_matrix(gen, n, 1 + trial % 2);
    if (trial % 3 == 0) {
      // Rank-deficient pair: block-diagonal A with B missing one block.
      a = Matrix::Zero(n, n);
      a.topLeftCorner(n - 1, n - 1) = random_matrix(gen, n - 1, n - 1);
      a(n - 1, n - 1) = 0.7;
      b.row(n - 1).setZero();
    }
    Matrix t = random_matrix(gen, n, n) + 3.0 * Matrix::Identity(n, n);
    const Matrix ta = t * a * t.inverse();
    const Matrix tb = t * b;
    CHECK(ctrb_rank(a, b) == ctrb_rank(ta, tb));
    CHECK(ctrb_rank(a, b) == lu_rank(a, b));
  }
}

TEST_CASE("transition matrices") {
  std::mt19937_64 gen(5);
  const Matrix a0 = random_matrix(gen, 3, 3);
  const Matrix a1 = random_matrix(gen, 3, 3);
  const std::vector<Matrix> seq{a0, a1};
  CHECK(transition(seq, 1, 1).isIdentity());
  CHECK((transition(seq, 0, 2) - a1 * a0).norm() < 1e-14);
  CHECK_THROWS(transition(seq, 0, 3));
  CHECK_THROWS(transition(seq, 2, 1));

  const Matrix a = jacobian({3.0, 0.33, 5, {1}});
  const std::vector<Matrix> constant(5, a);
  Matrix power = Matrix::Identity(5, 5);
  for (int k = 0; k < 5; ++k) power = power * a;
  CHECK((transition(constant, 0, 5) - power).norm() < 1e-14);
}

TEST_CASE("transition semigroup property") {
  std::mt19937_64 gen(9);
  std::vector<Matrix> seq;
  for (int k = 0; k < 8; ++k) seq.push_back(random_matrix(gen, 4, 4, 0.5));
  for (int a = 0; a <= 8; ++a)
    for (int b = a; b <= 8; ++b)
      for (int c = b; c <= 8; ++c) {
        const Matrix lhs = transition(seq, a, c);
        const Matrix rhs = transition(seq, b, c) * transition(seq, a, b);
        CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, lhs.norm()));
      }
}

TEST_CASE("residual covariance special cases") {
  const Matrix a = jacobian({3.0, 0.33, 5, {1}});
  const Matrix sigma = 0.001 * Matrix::Identity(5, 5);
  CHECK(residual_covariance(a, Matrix::Zero(5, 5), sigma, 5).norm() == 0.0);
  Matrix s1(5, 5);
  s1.setZero();
  s1.diagonal() << 1, 2, 3, 4, 5;
  CHECK((residual_covariance(a, Matrix::Identity(5, 5), s1, 1) - s1).norm() == 0.0);
}

TEST_CASE("time-varying residual covariance against the explicit sum") {
  std::mt19937_64 gen(13);
  const int n = 4, h = 6;
  std::vector<Matrix> as, es, ss;
  for (int k = 0; k < h; ++k) {
    as.push_back(random_matrix(gen, n, n, 0.6));
    es.push_back(random_matrix(gen, n, 2));
    ss.push_back(random_psd(gen, 2));
  }
  Matrix oracle = Matrix::Zero(n, n);
  for (int j = 1; j <= h; ++j) {
    Matrix phi = Matrix::Identity(n, n);
    for (int k = j; k < h; ++k) phi = as[k] * phi;  // A_{h-1} ... A_j
    oracle += phi * es[j - 1] * ss[j - 1] * es[j - 1].transpose() * phi.transpose();
  }
  const Matrix psi = residual_covariance(as, es, ss, h);
  CHECK((psi - oracle).norm() <= 1e-12 * oracle.norm());
  CHECK_THROWS(residual_covariance(as, es, ss, h + 1));
}

TEST_CASE("residual covariance is symmetric PSD") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 6;
    const double scale = trial % 2 ? 0.3 : 1.5;  // stable and unstable mixes
    const Matrix a = random_matrix(gen, n, n, scale);
    const Matrix e = random_matrix(gen, n, n);
    const Matrix s = random_psd(gen, n);
    const Matrix psi = residual_covariance(a, e, s, 1 + trial % 7);
    CHECK(is_symmetric(psi, 0.0));
    CHECK(min_eigenvalue_sym(psi) >= -1e-10 * std::max(1.0, psi.norm()));
  }
}

TEST_CASE("residual covariance agrees with Monte-Carlo rollouts") {
  LinearModel model = linearized_model({3.0, 0.33, 5, {1, 5}}, 0.001 * Matrix::Identity(5, 5));
  const Matrix psi = residual_covariance(model.A, model.E, model.Sigma, 5);
  const Matrix empirical = empirical_residual_covariance(model, 5, 10000, 99, Exec::parallel);
  CHECK((empirical - psi).norm() / psi.norm() < 0.1);

  // A second, non-identity noise input and a stable non-symmetric A.
  std::mt19937_64 gen(2);
  LinearModel other{random_matrix(gen, 3, 3, 0.4), Matrix::Zero(3, 1), random_psd(gen, 2) + 0.1 * Matrix::Identity(2, 2),
                    random_matrix(gen, 3, 2)};
  const Matrix psi3 = residual_covariance(other.A, other.E, other.Sigma, 4);
  const Matrix emp3 = empirical_residual_covariance(other, 4, 20000, 5, Exec::serial);
  CHECK((emp3 - psi3).norm() / psi3.norm() < 0.1);
}

TEST_CASE("stochastic controllability verdicts") {
  SUBCASE("stable A with PD noise") {
    Matrix a(3, 3);
    a << 0.5, 0.1, 0.0, 0.0, -0.4, 0.2, 0.1, 0.0, 0.3;
    const Matrix sigma = 0.01 * Matrix::Identity(3, 3);
    const auto r = stochastic_ctrb_verdict(a, Matrix::Identity(3, 3), sigma, 200, 1e-8);
    CHECK(r.psi_pd);
    CHECK(r.psi_bounded);
    CHECK(r.sc_rank == 3);
    CHECK(r.stochastically_controllable);
    // Partial-sum oracle for the norm sequence.
    Matrix partial = Matrix::Zero(3, 3), p = Matrix::Identity(3, 3);
    for (int k = 1; k <= 200; ++k) {
      partial += p * sigma * p.transpose();
      p = a * p;
      CHECK(r.psi_norm_sequence[k - 1] == doctest::Approx(spectral_norm(partial)).epsilon(1e-12));
    }
    // Converges to the stationary covariance.
    CHECK(r.psi_norm_sequence.back() ==
          doctest::Approx(spectral_norm(stationary_covariance(a, sigma))).epsilon(1e-10));
  }
  SUBCASE("unstable A diverges") {
    const auto r = stochastic_ctrb_verdict(2.0 * Matrix::Identity(3, 3), Matrix::Identity(3, 3),
                                           Matrix::Identity(3, 3), 60, 1e-8);
    CHECK_FALSE(r.psi_bounded);
    CHECK_FALSE(r.stochastically_controllable);
    CHECK(r.psi_norm_sequence[10] / r.psi_norm_sequence[9] == doctest::Approx(4.0).epsilon(1e-3));
  }
  SUBCASE("no noise input") {
    const auto r = stochastic_ctrb_verdict(0.5 * Matrix::Identity(3, 3), Matrix::Zero(3, 3),
                                           Matrix::Identity(3, 3), 50, 1e-8);
    CHECK_FALSE(r.psi_pd);
    CHECK(r.psi.norm() == 0.0);
    CHECK(r.sc_rank == 0);
    CHECK_FALSE(r.stochastically_controllable);
  }
  SUBCASE("marginal lattice mode grows linearly") {
    // alpha = -1 puts an eigenvalue on the unit circle for a = 3.
    const auto model = linearized_model({3.0, 0.33, 5, {1, 5}}, 0.001 * Matrix::Identity(5, 5));
    const auto r = analyze_controllability(model, 200, 1e-8);
    CHECK(r.det_rank == 5);
    CHECK(*r.det_controllable);
    CHECK(r.psi_pd);
    CHECK_FALSE(r.psi_bounded);
  }
}
