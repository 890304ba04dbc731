#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmlpin/controllability.hpp"
#include "cmlpin/fpd.hpp"
#include "cmlpin/lattice.hpp"
#include "cmlpin/linearize.hpp"
#include "cmlpin/montecarlo.hpp"

namespace cmlpin {

enum class PlantKind { nonlinear, linearized };
enum class ModelSource { analytic, identified };

struct ExperimentConfig {
  LatticeParams lattice;
  PlantKind plant = PlantKind::nonlinear;
  Matrix noise_cov;     // L x L plant noise covariance
  Matrix design_sigma;  // Sigma for the analytic model; empty means noise_cov
  Matrix gamma;         // M x M controller covariance
  Vector x0;            // initial deviation from z*
  int steps = 200;
  std::uint64_t seed = 42;
  bool deterministic_control = false;

  ModelSource model_source = ModelSource::analytic;
  long sysid_samples = 10000;
  double excitation_std = 0.1;
  bool diagonal_sigma = true;

  RiccatiOptions riccati;
  int ctrb_horizon = 200;
  double ctrb_bound_tol = 1e-8;

  void validate() const;
};

/// Deviation trajectory of one closed-loop run. Row t of each matrix is
/// time t. If the plant diverged the matrices are truncated after the
/// divergent step.
struct Trajectory {
  Matrix states;    // (T+1) x L
  Matrix controls;  // T x M
  Matrix noises;    // T x L
  Vector sync_error;  // ||x_t||_inf, length T+1
  std::optional<long> diverged_at;

  long steps() const { return controls.rows(); }
};

struct ExperimentResult {
  ExperimentConfig config;
  LinearModel true_model;    // linearisation with the plant noise covariance
  LinearModel design_model;  // analytic or identified
  GainSolution design;
  ControllabilityReport controllability;
  bool assumption1 = false;  // as_rank == L and spectral radius < 1
  Trajectory trajectory;
  std::vector<std::string> warnings;
};

/// The states whose magnitude marks divergence in simulation.
inline constexpr double kDivergenceBound = 1e12;

/// Closed-loop run of the nonlinear or linearised plant with u = C x + w.
/// Plant noise uses stream (seed, 0), control noise stream (seed, 1).
Trajectory simulate(const ExperimentConfig& config, const LinearModel& true_model, const Matrix& C);

/// Build/identify the model, design, check, simulate.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// One simulation per seed with a fixed gain; results are in seed order.
std::vector<Trajectory> simulate_batch(const ExperimentConfig& config, const LinearModel& true_model,
                                       const Matrix& C, std::span<const std::uint64_t> seeds, Exec exec);

struct SteadyStateStats {
  Vector rms;  // per site
  double max_abs = 0.0;
  double mean_control_norm = 0.0;  // mean Euclidean norm of u_t
};

/// Statistics over t in [burn_in, T] for states and [burn_in, T) for controls.
SteadyStateStats steady_state_stats(const Trajectory& traj, long burn_in);

/// Stationary closed-loop covariance P = F P F' + B Gamma B' + Sigma with
/// F = A + B C (Gamma omitted in deterministic mode).
Matrix closed_loop_covariance(const LinearModel& true_model, const Matrix& C, const Matrix& gamma,
                              bool deterministic);

/// Non-chaotic lattice: a = 3, e = 0.33, L = 5, pins {1, 5}.
ExperimentConfig fig1_config();
/// Chaotic lattice: a = 4, e = 0.25, L = 10, pins {1, 10}.
ExperimentConfig fig3_config();

}  // namespace cmlpin
