#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "cmlpin/errors.hpp"
#include "cmlpin/sysid.hpp"

using namespace cmlpin;

namespace {

LinearModel paper_plant() { return linearized_model({3.0, 0.33, 5, {1, 5}}, 0.001 * Matrix::Identity(5, 5)); }

ExcitationPolicy white_noise() {
  ExcitationPolicy p;
  p.input_std = 0.1;
  p.episode_length = 100;
  p.initial_std = 0.1;
  return p;
}

double fit_error(const FitResult& fit, const LinearModel& truth) {
  return std::sqrt((fit.model.A - truth.A).squaredNorm() + (fit.model.B - truth.B).squaredNorm());
}

}  // namespace

TEST_CASE("scalar system from three samples") {
  // x' = 0.5 x + u. Hand oracle: normal equations of [x u] -> x'.
  const double xs[3] = {1.0, 0.0, 2.0};
  const double us[3] = {0.0, 1.0, -1.0};
  Dataset d{1, 1, {}};
  double sxx = 0, sxu = 0, suu = 0, sxy = 0, suy = 0;
  for (int t = 0; t < 3; ++t) {
    const double y = 0.5 * xs[t] + us[t];
    d.records.push_back({Vector::Constant(1, xs[t]), Vector::Constant(1, us[t]), Vector::Constant(1, y)});
    sxx += xs[t] * xs[t];
    sxu += xs[t] * us[t];
    suu += us[t] * us[t];
    sxy += xs[t] * y;
    suy += us[t] * y;
  }
  const double det = sxx * suu - sxu * sxu;
  const double a = (sxy * suu - sxu * suy) / det;
  const double b = (sxx * suy - sxu * sxy) / det;
  CHECK(a == doctest::Approx(0.5));
  CHECK(b == doctest::Approx(1.0));

  const auto fit = fit_linear_model(d);
  CHECK(fit.model.A(0, 0) == doctest::Approx(a).epsilon(1e-12));
  CHECK(fit.model.B(0, 0) == doctest::Approx(b).epsilon(1e-12));
  CHECK(fit.model.Sigma(0, 0) < 1e-28);
}

TEST_CASE("noise-free data recovers the model exactly") {
  LinearModel truth = paper_plant();
  truth.Sigma.setZero();
  const auto data = excite_and_collect(truth, white_noise(), 200, 4);
  const auto fit = fit_linear_model(data);
  CHECK(fit_error(fit, truth) < 1e-8);
  CHECK(fit.sigma_full.norm() < 1e-20);
}

TEST_CASE("noisy data from the five-site lattice") {
  const LinearModel truth = paper_plant();
  const auto data = excite_and_collect(truth, white_noise(), 10000, 2024);
  const auto fit = fit_linear_model(data);
  CHECK((fit.model.A - truth.A).norm() < 0.02);
  for (int i = 0; i < 5; ++i) {
    CHECK(fit.model.Sigma(i, i) > 0.0005);
    CHECK(fit.model.Sigma(i, i) < 0.002);
  }
  // Diagonal mode keeps only the diagonal; full covariance is symmetric PSD.
  CHECK((fit.model.Sigma - Matrix(fit.sigma_full.diagonal().asDiagonal())).norm() == 0.0);
  CHECK(is_psd(fit.sigma_full));

  const auto full = fit_linear_model(data, {false});
  CHECK((full.model.Sigma - fit.sigma_full).norm() == 0.0);
}

TEST_CASE("residuals are orthogonal to the regressors") {
  const auto data = excite_and_collect(paper_plant(), white_noise(), 3000, 8);
  const auto fit = fit_linear_model(data);
  Matrix cross = Matrix::Zero(5, 7);
  double scale = 0.0;
  for (std::size_t t = 0; t < data.size(); ++t) {
    Vector reg(7);
    reg << data.records[t].x, data.records[t].u;
    cross += fit.residuals.col(static_cast<Eigen::Index>(t)) * reg.transpose();
    scale += fit.residuals.col(static_cast<Eigen::Index>(t)).norm() * reg.norm();
  }
  CHECK(cross.cwiseAbs().maxCoeff() < 1e-10 * scale);
}

TEST_CASE("estimates improve with more data") {
  const LinearModel truth = paper_plant();
  double previous = 1e9;
  for (long n : {100L, 1000L, 10000L}) {
    double mean_error = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed)
      mean_error += fit_error(fit_linear_model(excite_and_collect(truth, white_noise(), n, 100 + seed)), truth) / 5;
    CHECK(mean_error < previous);
    previous = mean_error;
  }
}

TEST_CASE("insufficient excitation is rejected") {
  LinearModel truth = paper_plant();
  ExcitationPolicy silent;
  silent.input_std = 0.0;
  silent.initial_std = 0.0;
  truth.Sigma.setZero();
  const auto data = excite_and_collect(truth, silent, 100, 1);
  CHECK_THROWS_AS(fit_linear_model(data), IdentifiabilityError);

  Dataset tiny{5, 2, {}};
  tiny.records.push_back({Vector::Ones(5), Vector::Ones(2), Vector::Ones(5)});
  CHECK_THROWS_AS(fit_linear_model(tiny), IdentifiabilityError);
}

TEST_CASE("collection contract") {
  const LinearModel truth = paper_plant();
  CHECK_THROWS_AS(excite_and_collect(truth, white_noise(), 0, 1), std::invalid_argument);

  const auto a = excite_and_collect(truth, white_noise(), 500, 77);
  const auto b = excite_and_collect(truth, white_noise(), 500, 77);
  REQUIRE(a.size() == 500);
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(a.records[t].x == b.records[t].x);
    CHECK(a.records[t].u == b.records[t].u);
    CHECK(a.records[t].x_next == b.records[t].x_next);
  }
  const auto c = excite_and_collect(truth, white_noise(), 500, 78);
  CHECK(a.records[10].u != c.records[10].u);
}

TEST_CASE("divergence during collection reports the step") {
  LinearModel unstable = paper_plant();
  unstable.A = 3.0 * Matrix::Identity(5, 5);
  ExcitationPolicy p = white_noise();
  p.episode_length = 0;
  try {
    excite_and_collect(unstable, p, 10000, 3);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() > 5);
    CHECK(e.step() < 100);
  }
}

TEST_CASE("nonlinear plant data linearises near the fixed point") {
  const LatticeParams params{3.0, 0.33, 5, {1, 5}};
  ExcitationPolicy p;
  p.input_std = 0.01;
  p.episode_length = 20;
  p.initial_std = 0.01;
  const auto data = excite_and_collect(NonlinearPlant{params, 1e-6 * Matrix::Identity(5, 5)}, p, 20000, 12);
  const auto fit = fit_linear_model(data);
  CHECK((fit.model.A - jacobian(params)).norm() < 0.05);
  CHECK((fit.model.B - pin_matrix(5, {1, 5})).norm() < 0.05);
}

TEST_CASE("dataset CSV round trip") {
  const auto data = excite_and_collect(paper_plant(), white_noise(), 50, 5);
  const auto path = std::filesystem::temp_directory_path() / "cmlpin_dataset_test.csv";
  write_dataset_csv(data, path);
  {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x1,x2,x3,x4,x5,u1,u2,xnext1,xnext2,xnext3,xnext4,xnext5");
  }
  const auto back = read_dataset_csv(path);
  REQUIRE(back.size() == data.size());
  CHECK(back.state_dim == 5);
  CHECK(back.input_dim == 2);
  for (std::size_t t = 0; t < data.size(); ++t) {
    CHECK(back.records[t].x == data.records[t].x);
    CHECK(back.records[t].u == data.records[t].u);
    CHECK(back.records[t].x_next == data.records[t].x_next);
  }
  std::filesystem::remove(path);

  CHECK_THROWS_AS(read_dataset_csv("/nonexistent/data.csv"), IoError);
}
