#include "cmlpin/lattice.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cmlpin {

void validate_pins(int length, const std::vector<int>& pin_sites) {
  if (pin_sites.empty() || static_cast<int>(pin_sites.size()) > length)
    throw std::invalid_argument("need between 1 and L pin sites");
  for (int p : pin_sites)
    if (p < 1 || p > length)
      throw std::invalid_argument("pin site " + std::to_string(p) + " outside 1.." + std::to_string(length));
  std::vector<int> sorted = pin_sites;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("duplicate pin site");
}

void LatticeParams::validate() const {
  if (!(a > 0.0 && a <= 4.0)) throw std::invalid_argument("map parameter a must lie in (0, 4]");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("coupling epsilon must lie in (0, 0.5)");
  if (length < 2) throw std::invalid_argument("lattice length must be at least 2");
  validate_pins(length, pin_sites);
}

double fixed_point(double a) {
  if (!(a > 1.0)) throw std::invalid_argument("fixed point requires a > 1");
  return 1.0 - 1.0 / a;
}

Vector step(const Vector& state, const LatticeParams& params, const Vector& controls, const Vector& noise) {
  const Eigen::Index n = params.length;
  if (state.size() != n || noise.size() != n || controls.size() != params.num_pins())
    throw std::invalid_argument("step: dimension mismatch");
  const double e = params.epsilon;
  Vector next(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = state((i + n - 1) % n);
    const double right = state((i + 1) % n);
    next(i) = logistic_map((1.0 - 2.0 * e) * state(i) + e * (left + right), params.a);
  }
  for (int m = 0; m < params.num_pins(); ++m) next(params.pin_sites[m] - 1) += controls(m);
  next += noise;
  return next;
}

Vector step(const Vector& state, const LatticeParams& params) {
  return step(state, params, Vector::Zero(params.num_pins()), Vector::Zero(params.length));
}

}  // namespace cmlpin
