// Command-line front end: linearize, ctrb, identify, design, simulate,
// reproduce fig1|fig3.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cmlpin/config.hpp"
#include "cmlpin/controllability.hpp"
#include "cmlpin/errors.hpp"
#include "cmlpin/experiment.hpp"
#include "cmlpin/fpd.hpp"
#include "cmlpin/linearize.hpp"
#include "cmlpin/report.hpp"
#include "cmlpin/sysid.hpp"

namespace fs = std::filesystem;
using namespace cmlpin;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDesignFailure = 2,
  kIdentifiability = 3,
  kIo = 4,
  kDivergence = 5,
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string plant;
  std::string model;
  std::string data;
  std::string figure;
};

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.plant.empty()) c.plant = parse_plant_kind(o.plant);
  if (!o.model.empty()) c.model_source = parse_model_source(o.model);
  c.validate();
  return c;
}

void write_csv(const fs::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_matrix_csv(out, m);
  if (!out) throw IoError("write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
}

void print_matrix(const char* name, const Matrix& m) {
  std::cout << name << " =\n";
  write_matrix_csv(std::cout, m);
}

// Model used for design: analytic linearisation or fitted from excitation data.
LinearModel design_model(const ExperimentConfig& c) {
  if (c.model_source == ModelSource::analytic) {
    return linearized_model(c.lattice, c.design_sigma.size() > 0 ? c.design_sigma : c.noise_cov);
  }
  ExcitationPolicy policy;
  policy.input_std = c.excitation_std;
  policy.episode_length = 100;
  policy.initial_std = c.excitation_std;
  const auto data = excite_and_collect(linearized_model(c.lattice, c.noise_cov), policy, c.sysid_samples,
                                       stream_seed(c.seed, 2));
  return fit_linear_model(data, {c.diagonal_sigma}).model;
}

int cmd_linearize(const Options& o) {
  const auto c = resolve(o);
  const auto model = linearized_model(c.lattice, c.noise_cov);
  std::cout << "z* = " << format_double(fixed_point(c.lattice.a)) << '\n';
  std::cout << "alpha = " << format_double(map_slope_at_fixed_point(c.lattice.a)) << '\n';
  print_matrix("A", model.A);
  print_matrix("B", model.B);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_csv(fs::path(o.out) / "A.csv", model.A);
    write_csv(fs::path(o.out) / "B.csv", model.B);
  }
  return kOk;
}

int cmd_ctrb(const Options& o) {
  const auto c = resolve(o);
  const auto model = design_model(c);
  const auto r = analyze_controllability(model, c.ctrb_horizon, c.ctrb_bound_tol);
  std::cout << "ctrb_rank = " << r.det_rank.value_or(-1) << '\n'
            << "det_controllable = " << (r.det_controllable.value_or(false) ? "true" : "false") << '\n'
            << "sc_rank = " << r.sc_rank << '\n'
            << "psi_pd = " << (r.psi_pd ? "true" : "false") << '\n'
            << "psi_bounded = " << (r.psi_bounded ? "true" : "false") << '\n'
            << "stochastically_controllable = " << (r.stochastically_controllable ? "true" : "false") << '\n'
            << "as_rank = " << as_rank(model.Sigma, model.A) << '\n';
  print_matrix("Psi", r.psi);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_csv(fs::path(o.out) / "psi.csv", r.psi);
    std::ofstream seq(fs::path(o.out) / "psi_norms.csv", std::ios::binary);
    if (!seq) throw IoError("cannot write psi_norms.csv in " + o.out);
    seq << "k,norm\n";
    for (std::size_t k = 0; k < r.psi_norm_sequence.size(); ++k)
      seq << k + 1 << ',' << format_double(r.psi_norm_sequence[k]) << '\n';
  }
  return kOk;
}

int cmd_identify(const Options& o) {
  Dataset data;
  std::optional<ExperimentConfig> cfg;
  bool diagonal = true;
  if (!o.data.empty()) {
    data = read_dataset_csv(o.data);
    if (!o.config.empty()) diagonal = resolve(o).diagonal_sigma;
  } else {
    cfg = resolve(o);
    ExcitationPolicy policy;
    policy.input_std = cfg->excitation_std;
    policy.episode_length = 100;
    policy.initial_std = cfg->excitation_std;
    const PlantKind kind = o.plant.empty() ? PlantKind::linearized : cfg->plant;
    Plant plant = kind == PlantKind::linearized ? Plant(linearized_model(cfg->lattice, cfg->noise_cov))
                                                : Plant(NonlinearPlant{cfg->lattice, cfg->noise_cov});
    data = excite_and_collect(plant, policy, cfg->sysid_samples, stream_seed(cfg->seed, 2));
    diagonal = cfg->diagonal_sigma;
  }
  const auto fit = fit_linear_model(data, {diagonal});
  std::cout << "records = " << data.size() << '\n';
  print_matrix("A", fit.model.A);
  print_matrix("B", fit.model.B);
  print_matrix("Sigma", fit.model.Sigma);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    const fs::path dir(o.out);
    if (o.data.empty()) write_dataset_csv(data, dir / "dataset.csv");
    write_csv(dir / "A.csv", fit.model.A);
    write_csv(dir / "B.csv", fit.model.B);
    write_csv(dir / "sigma.csv", fit.model.Sigma);
    write_csv(dir / "sigma_full.csv", fit.sigma_full);
  }
  return kOk;
}

void print_design(const GainSolution& d) {
  std::cout << "riccati_iterations = " << d.iterations << '\n'
            << "riccati_residual = " << format_double(d.riccati_residual) << '\n'
            << "lyapunov_residual = " << format_double(d.lyapunov_residual) << '\n'
            << "spectral_radius = " << format_double(d.spectral_radius()) << '\n'
            << "as_rank = " << d.as_rank << '\n';
  print_matrix("C", d.C);
}

int cmd_design(const Options& o) {
  const auto c = resolve(o);
  const auto model = design_model(c);
  const auto d = design(model, c.gamma, c.riccati);
  print_design(d);
  if (!o.out.empty()) emit_design(d, o.out);
  return kOk;
}

int run_and_report(const ExperimentConfig& c, const Options& o) {
  const auto r = run_experiment(c);
  print_design(r.design);
  std::cout << "final_sync_error = " << format_double(r.trajectory.sync_error.tail(1)(0)) << '\n';
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  if (!o.out.empty()) emit_report(r, o.out);
  return kOk;
}

int cmd_simulate(const Options& o) { return run_and_report(resolve(o), o); }

int cmd_reproduce(const Options& o) {
  ExperimentConfig c = o.figure == "fig1" ? fig1_config() : fig3_config();
  if (!o.config.empty()) c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.plant.empty()) c.plant = parse_plant_kind(o.plant);
  if (!o.model.empty()) c.model_source = parse_model_source(o.model);
  return run_and_report(c, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic pinning control of stochastic coupled map lattices"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", o.config, "Experiment config file")->check(CLI::ExistingFile);
    if (config_required) opt->required();
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--plant", o.plant, "Plant kind")->check(CLI::IsMember({"nonlinear", "linearized"}));
    sub->add_option("--model", o.model, "Model source")->check(CLI::IsMember({"analytic", "identified"}));
  };

  auto* linearize = app.add_subcommand("linearize", "Print the Jacobian and pin matrix");
  add_common(linearize, true);
  auto* ctrb = app.add_subcommand("ctrb", "Deterministic and stochastic controllability");
  add_common(ctrb, true);
  auto* identify = app.add_subcommand("identify", "Collect excitation data and fit (A, B, Sigma)");
  add_common(identify, false);
  identify->add_option("--data", o.data, "Fit an existing dataset CSV instead of collecting")
      ->check(CLI::ExistingFile);
  auto* design_cmd = app.add_subcommand("design", "Solve for the cost matrix and controller gain");
  add_common(design_cmd, true);
  auto* simulate_cmd = app.add_subcommand("simulate", "Design and run one closed-loop simulation");
  add_common(simulate_cmd, true);
  auto* reproduce = app.add_subcommand("reproduce", "Run a built-in experiment (fig1 or fig3)");
  add_common(reproduce, false);
  reproduce->add_option("figure", o.figure, "fig1 or fig3")->required()->check(CLI::IsMember({"fig1", "fig3"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (identify->parsed() && o.data.empty() && o.config.empty())
      throw std::invalid_argument("identify needs --config or --data");
    if (linearize->parsed()) return cmd_linearize(o);
    if (ctrb->parsed()) return cmd_ctrb(o);
    if (identify->parsed()) return cmd_identify(o);
    if (design_cmd->parsed()) return cmd_design(o);
    if (simulate_cmd->parsed()) return cmd_simulate(o);
    if (reproduce->parsed()) return cmd_reproduce(o);
  } catch (const DesignError& e) {
    std::cerr << "design failure: " << e.what() << '\n';
    return kDesignFailure;
  } catch (const IdentifiabilityError& e) {
    std::cerr << "identifiability failure: " << e.what() << '\n';
    return kIdentifiability;
  } catch (const IoError& e) {
    std::cerr << "I/O failure: " << e.what() << '\n';
    return kIo;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
