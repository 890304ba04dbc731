// Serial vs OpenMP timing for the two parallel kernels. Also confirms that
// both paths produce identical results.

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <vector>

#include "cmlpin/experiment.hpp"
#include "cmlpin/montecarlo.hpp"

using namespace cmlpin;

namespace {

template <class F>
double time_it(F&& f, int reps) {
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const long samples = argc > 1 ? std::atol(argv[1]) : 100000;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
  std::cout << "threads: " << omp_get_max_threads() << '\n';

  const auto cfg = fig3_config();
  const auto model = linearized_model(cfg.lattice, cfg.design_sigma);
  const int horizon = cfg.lattice.length;

  Matrix serial, parallel;
  const double ts = time_it([&] { serial = sample_residuals(model, horizon, samples, 1, Exec::serial); }, reps);
  const double tp = time_it([&] { parallel = sample_residuals(model, horizon, samples, 1, Exec::parallel); }, reps);
  const bool same = (serial.array() == parallel.array()).all();
  std::cout << "sample_residuals  n=" << samples << "  serial " << ts << " s  parallel " << tp << " s  speedup "
            << ts / tp << "  identical " << (same ? "yes" : "NO") << '\n';

  auto lin = cfg;
  lin.plant = PlantKind::linearized;
  lin.steps = 2000;
  const auto truth = linearized_model(lin.lattice, lin.noise_cov);
  const auto d = design(model, lin.gamma);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 64; ++s) seeds.push_back(s);
  std::vector<Trajectory> bs, bp;
  const double bts = time_it([&] { bs = simulate_batch(lin, truth, d.C, seeds, Exec::serial); }, reps);
  const double btp = time_it([&] { bp = simulate_batch(lin, truth, d.C, seeds, Exec::parallel); }, reps);
  bool batch_same = bs.size() == bp.size();
  for (std::size_t i = 0; batch_same && i < bs.size(); ++i)
    batch_same = (bs[i].states.array() == bp[i].states.array()).all();
  std::cout << "simulate_batch    seeds=" << seeds.size() << " T=" << lin.steps << "  serial " << bts
            << " s  parallel " << btp << " s  speedup " << bts / btp << "  identical " << (batch_same ? "yes" : "NO")
            << '\n';
  return same && batch_same ? 0 : 1;
}
