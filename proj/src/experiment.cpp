#include "cmlpin/experiment.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cmlpin/errors.hpp"
#include "cmlpin/random.hpp"
#include "cmlpin/sysid.hpp"

namespace cmlpin {

void ExperimentConfig::validate() const {
  lattice.validate();
  const Eigen::Index n = lattice.length;
  const Eigen::Index m = lattice.num_pins();
  if (noise_cov.rows() != n || noise_cov.cols() != n || !is_psd(noise_cov))
    throw std::invalid_argument("noise covariance must be L x L symmetric PSD");
  if (design_sigma.size() > 0 && (design_sigma.rows() != n || design_sigma.cols() != n))
    throw std::invalid_argument("design Sigma must be L x L");
  if (gamma.rows() != m || gamma.cols() != m || !is_spd(gamma))
    throw std::invalid_argument("Gamma must be M x M symmetric positive definite");
  if (x0.size() != n) throw std::invalid_argument("x0 must have L entries");
  if (steps < 1) throw std::invalid_argument("simulation needs at least one step");
  if (model_source == ModelSource::identified && sysid_samples < n + m)
    throw std::invalid_argument("sysid_samples must be at least L + M");
  if (ctrb_horizon < n) throw std::invalid_argument("controllability horizon must be at least L");
}

Trajectory simulate(const ExperimentConfig& config, const LinearModel& true_model, const Matrix& C) {
  const Eigen::Index n = config.lattice.length;
  const Eigen::Index m = config.lattice.num_pins();
  const long steps = config.steps;
  const double z_star = fixed_point(config.lattice.a);
  const Matrix noise_root = sym_sqrt(config.noise_cov);
  const ControlSampler controller(C, config.gamma, config.deterministic_control);
  NormalStream plant_rng(config.seed, 0);
  NormalStream control_rng(config.seed, 1);

  Trajectory traj;
  traj.states.resize(steps + 1, n);
  traj.controls.resize(steps, m);
  traj.noises.resize(steps, n);
  traj.states.row(0) = config.x0.transpose();

  Vector x = config.x0;
  long filled = steps;
  for (long t = 0; t < steps; ++t) {
    const Vector u = controller(x, control_rng);
    const Vector w = plant_rng.gaussian(noise_root);
    if (config.plant == PlantKind::linearized) {
      x = true_model.A * x + true_model.B * u + true_model.E * w;
    } else {
      const Vector z = x.array() + z_star;
      x = step(z, config.lattice, u, w).array() - z_star;
    }
    traj.controls.row(t) = u.transpose();
    traj.noises.row(t) = w.transpose();
    traj.states.row(t + 1) = x.transpose();
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound) {
      traj.diverged_at = t + 1;
      filled = t + 1;
      break;
    }
  }
  if (filled < steps) {
    traj.states.conservativeResize(filled + 1, n);
    traj.controls.conservativeResize(filled, m);
    traj.noises.conservativeResize(filled, n);
  }
  traj.sync_error.resize(traj.states.rows());
  for (Eigen::Index t = 0; t < traj.states.rows(); ++t) traj.sync_error(t) = traj.states.row(t).cwiseAbs().maxCoeff();
  return traj;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  result.true_model = linearized_model(config.lattice, config.noise_cov);

  if (config.model_source == ModelSource::analytic) {
    const Matrix& sigma = config.design_sigma.size() > 0 ? config.design_sigma : config.noise_cov;
    result.design_model = linearized_model(config.lattice, sigma);
  } else {
    ExcitationPolicy policy;
    policy.input_std = config.excitation_std;
    policy.episode_length = 100;
    policy.initial_std = config.excitation_std;
    const auto data = excite_and_collect(result.true_model, policy, config.sysid_samples, stream_seed(config.seed, 2));
    result.design_model = fit_linear_model(data, {config.diagonal_sigma}).model;
  }
  if (!is_spd(result.design_model.Sigma))
    throw DesignError("model noise covariance is not positive definite; cannot design");

  result.design = design(result.design_model, config.gamma, config.riccati);
  result.controllability = analyze_controllability(result.design_model, config.ctrb_horizon, config.ctrb_bound_tol);

  const auto n = config.lattice.length;
  result.assumption1 = result.design.as_rank == n && result.design.stabilizing();
  if (result.design.as_rank != n)
    result.warnings.push_back("Assumption 1 violated: as_rank " + std::to_string(result.design.as_rank) + " < " +
                              std::to_string(n));
  if (!result.design.stabilizing()) result.warnings.push_back("closed loop A + BC is not stable");
  if (!result.controllability.det_controllable.value_or(false))
    result.warnings.push_back("(A, B) is not controllable");

  result.trajectory = simulate(config, result.true_model, result.design.C);
  if (result.trajectory.diverged_at)
    result.warnings.push_back("plant diverged at step " + std::to_string(*result.trajectory.diverged_at));
  return result;
}

std::vector<Trajectory> simulate_batch(const ExperimentConfig& config, const LinearModel& true_model,
                                       const Matrix& C, std::span<const std::uint64_t> seeds, Exec exec) {
  config.validate();
  std::vector<Trajectory> out(seeds.size());
  const long count = static_cast<long>(seeds.size());
  auto run_one = [&](long i) {
    ExperimentConfig local = config;
    local.seed = seeds[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = simulate(local, true_model, C);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) run_one(i);
  } else {
    for (long i = 0; i < count; ++i) run_one(i);
  }
  return out;
}

SteadyStateStats steady_state_stats(const Trajectory& traj, long burn_in) {
  const long rows = traj.states.rows();
  if (burn_in < 0 || burn_in >= rows)
    throw std::invalid_argument("burn_in must lie in [0, T)");
  SteadyStateStats s;
  const auto tail = traj.states.bottomRows(rows - burn_in);
  s.rms = (tail.array().square().colwise().sum() / static_cast<double>(tail.rows())).sqrt().transpose();
  s.max_abs = tail.cwiseAbs().maxCoeff();
  const long controls = traj.controls.rows() - burn_in;
  if (controls > 0) {
    double total = 0.0;
    for (long t = burn_in; t < traj.controls.rows(); ++t) total += traj.controls.row(t).norm();
    s.mean_control_norm = total / static_cast<double>(controls);
  }
  return s;
}

Matrix closed_loop_covariance(const LinearModel& true_model, const Matrix& C, const Matrix& gamma,
                              bool deterministic) {
  const Matrix f = true_model.A + true_model.B * C;
  Matrix q = true_model.E * true_model.Sigma * true_model.E.transpose();
  if (!deterministic) q += true_model.B * gamma * true_model.B.transpose();
  return stationary_covariance(f, q);
}

namespace {

ExperimentConfig base_config(double a, double epsilon, int length, const std::vector<double>& sigma) {
  ExperimentConfig c;
  c.lattice = {a, epsilon, length, {1, length}};
  c.noise_cov = 0.001 * Matrix::Identity(length, length);
  c.design_sigma = Eigen::Map<const Vector>(sigma.data(), static_cast<Eigen::Index>(sigma.size())).asDiagonal();
  c.gamma = 0.01 * Matrix::Identity(2, 2);
  c.x0 = Vector::Constant(length, 0.9);
  c.steps = 200;
  c.seed = 42;
  return c;
}

}  // namespace

ExperimentConfig fig1_config() { return base_config(3.0, 0.33, 5, {0.00095, 0.00105, 0.00097, 0.0009, 0.0011}); }

ExperimentConfig fig3_config() {
  return base_config(4.0, 0.25, 10,
                     {0.00094, 0.0017, 0.00109, 0.00089, 0.0008, 0.00097, 0.00104, 0.00092, 0.0011, 0.00101});
}

}  // namespace cmlpin
