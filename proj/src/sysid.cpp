#include "cmlpin/sysid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cmlpin/errors.hpp"
#include "cmlpin/random.hpp"
#include "cmlpin/report.hpp"

namespace cmlpin {

void Dataset::validate() const {
  if (state_dim < 1 || input_dim < 1) throw std::invalid_argument("dataset: empty dimensions");
  for (const auto& r : records)
    if (r.x.size() != state_dim || r.x_next.size() != state_dim || r.u.size() != input_dim)
      throw std::invalid_argument("dataset: inconsistent record dimensions");
}

FitResult fit_linear_model(const Dataset& data, const FitOptions& options) {
  data.validate();
  const auto n = data.state_dim;
  const auto m = data.input_dim;
  const auto count = static_cast<Eigen::Index>(data.size());
  if (count < n + m)
    throw IdentifiabilityError("need at least " + std::to_string(n + m) + " records, got " + std::to_string(count));

  // Rows are samples: Y = Phi Theta, Phi = [x' u'], Theta = [A'; B'].
  Matrix phi(count, n + m);
  Matrix y(count, n);
  for (Eigen::Index t = 0; t < count; ++t) {
    const auto& r = data.records[static_cast<std::size_t>(t)];
    phi.row(t).head(n) = r.x.transpose();
    phi.row(t).tail(m) = r.u.transpose();
    y.row(t) = r.x_next.transpose();
  }
  const int rank = numerical_rank(phi);
  if (rank < n + m)
    throw IdentifiabilityError("regressors [x; u] have rank " + std::to_string(rank) + " < " +
                               std::to_string(n + m) + ": insufficient excitation");

  const Matrix theta = phi.colPivHouseholderQr().solve(y);
  FitResult fit;
  fit.model.A = theta.topRows(n).transpose();
  fit.model.B = theta.bottomRows(m).transpose();
  fit.model.E = Matrix::Identity(n, n);
  fit.residuals = (y - phi * theta).transpose();
  fit.sigma_full = symmetrize(fit.residuals * fit.residuals.transpose() / static_cast<double>(count));
  fit.model.Sigma = options.diagonal_sigma ? Matrix(fit.sigma_full.diagonal().asDiagonal()) : fit.sigma_full;
  return fit;
}

namespace {

struct Rollout {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Matrix noise_root;
  const NonlinearPlant* nonlinear = nullptr;
  const LinearModel* linear = nullptr;
  double z_star = 0.0;

  Vector next(const Vector& x, const Vector& u, const Vector& noise) const {
    if (linear) return linear->A * x + linear->B * u + linear->E * noise;
    const Vector z = x.array() + z_star;
    return step(z, nonlinear->params, u, noise).array() - z_star;
  }
};

}  // namespace

Dataset excite_and_collect(const Plant& plant, const ExcitationPolicy& policy, long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("excite_and_collect: need at least one sample");
  Rollout roll;
  if (const auto* p = std::get_if<NonlinearPlant>(&plant)) {
    p->params.validate();
    roll.nonlinear = p;
    roll.n = p->params.length;
    roll.m = p->params.num_pins();
    roll.z_star = fixed_point(p->params.a);
    roll.noise_root = sym_sqrt(p->noise_cov);
  } else {
    const auto& lm = std::get<LinearModel>(plant);
    lm.validate_shapes();
    roll.linear = &lm;
    roll.n = lm.states();
    roll.m = lm.inputs();
    roll.noise_root = sym_sqrt(lm.Sigma);
  }
  if (roll.noise_root.rows() != (roll.linear ? roll.linear->E.cols() : roll.n))
    throw std::invalid_argument("excite_and_collect: noise covariance has wrong size");
  const bool has_feedback = policy.feedback.size() > 0;
  if (has_feedback && (policy.feedback.rows() != roll.m || policy.feedback.cols() != roll.n))
    throw std::invalid_argument("excite_and_collect: feedback must be M x L");

  NormalStream rng(seed);
  Dataset data;
  data.state_dim = roll.n;
  data.input_dim = roll.m;
  data.records.reserve(static_cast<std::size_t>(n));

  Vector x = policy.initial_std * rng.normal_vector(roll.n);
  for (long t = 0; t < n; ++t) {
    if (policy.episode_length > 0 && t > 0 && t % policy.episode_length == 0)
      x = policy.initial_std * rng.normal_vector(roll.n);
    Vector u = policy.input_std * rng.normal_vector(roll.m);
    if (has_feedback) u += policy.feedback * x;
    const Vector noise = rng.gaussian(roll.noise_root);
    Vector x_next = roll.next(x, u, noise);
    if (!x_next.allFinite() || x_next.cwiseAbs().maxCoeff() > policy.divergence_bound)
      throw DivergenceError("plant diverged during excitation at step " + std::to_string(t), t);
    data.records.push_back({x, u, x_next});
    x = std::move(x_next);
  }
  return data;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << 't';
  for (Eigen::Index i = 1; i <= data.state_dim; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= data.input_dim; ++i) out << ",u" << i;
  for (Eigen::Index i = 1; i <= data.state_dim; ++i) out << ",xnext" << i;
  out << '\n';
  for (std::size_t t = 0; t < data.size(); ++t) {
    const auto& r = data.records[t];
    out << t;
    for (auto v : r.x) out << ',' << format_double(v);
    for (auto v : r.u) out << ',' << format_double(v);
    for (auto v : r.x_next) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
  }
  return cells;
}

}  // namespace

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing header");
  const auto header = split_csv(line);
  Dataset data;
  for (const auto& h : header) {
    if (h.rfind("xnext", 0) == 0) continue;
    if (h.rfind('x', 0) == 0) ++data.state_dim;
    else if (h.rfind('u', 0) == 0) ++data.input_dim;
  }
  const auto expected = static_cast<std::size_t>(1 + 2 * data.state_dim + data.input_dim);
  if (header.size() != expected || header.front() != "t")
    throw IoError(path.string() + ": header must be t,x1..xL,u1..uM,xnext1..xnextL");

  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != expected) throw IoError(path.string() + ": row " + std::to_string(row) + " has wrong width");
    Record r{Vector(data.state_dim), Vector(data.input_dim), Vector(data.state_dim)};
    try {
      std::size_t c = 1;
      for (Eigen::Index i = 0; i < data.state_dim; ++i) r.x(i) = std::stod(cells[c++]);
      for (Eigen::Index i = 0; i < data.input_dim; ++i) r.u(i) = std::stod(cells[c++]);
      for (Eigen::Index i = 0; i < data.state_dim; ++i) r.x_next(i) = std::stod(cells[c++]);
    } catch (const std::exception&) {
      throw IoError(path.string() + ": row " + std::to_string(row) + " has a non-numeric value");
    }
    data.records.push_back(std::move(r));
  }
  return data;
}

}  // namespace cmlpin
