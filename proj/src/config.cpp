#include "cmlpin/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cmlpin/errors.hpp"

namespace cmlpin {

namespace pt = boost::property_tree;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::string cleaned = text;
  for (char& c : cleaned)
    if (c == ',' || c == '[' || c == ']' || c == ';') c = ' ';
  std::istringstream in(cleaned);
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw std::invalid_argument("not a number: '" + token + "'");
    values.push_back(v);
  }
  return values;
}

// A scalar s means s * I; a list is the diagonal.
Matrix diag_or_scalar(const std::string& text, Eigen::Index n, const std::string& key) {
  const auto v = parse_list(text);
  if (v.size() == 1) return v.front() * Matrix::Identity(n, n);
  if (static_cast<Eigen::Index>(v.size()) != n)
    throw std::invalid_argument(key + ": expected 1 or " + std::to_string(n) + " values");
  return Eigen::Map<const Vector>(v.data(), n).asDiagonal();
}

Vector vector_or_scalar(const std::string& text, Eigen::Index n, const std::string& key) {
  const auto v = parse_list(text);
  if (v.size() == 1) return Vector::Constant(n, v.front());
  if (static_cast<Eigen::Index>(v.size()) != n)
    throw std::invalid_argument(key + ": expected 1 or " + std::to_string(n) + " values");
  return Eigen::Map<const Vector>(v.data(), n);
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

}  // namespace

PlantKind parse_plant_kind(const std::string& s) {
  if (s == "nonlinear") return PlantKind::nonlinear;
  if (s == "linearized") return PlantKind::linearized;
  throw std::invalid_argument("plant must be nonlinear or linearized, got '" + s + "'");
}

ModelSource parse_model_source(const std::string& s) {
  if (s == "analytic") return ModelSource::analytic;
  if (s == "identified") return ModelSource::identified;
  throw std::invalid_argument("model must be analytic or identified, got '" + s + "'");
}

const char* to_string(PlantKind kind) { return kind == PlantKind::nonlinear ? "nonlinear" : "linearized"; }
const char* to_string(ModelSource source) { return source == ModelSource::analytic ? "analytic" : "identified"; }

namespace {

ExperimentConfig from_tree(const pt::ptree& tree) {
  ExperimentConfig c;
  c.lattice.a = tree.get<double>("lattice.a");
  c.lattice.epsilon = tree.get<double>("lattice.epsilon");
  c.lattice.length = tree.get<int>("lattice.length");
  c.lattice.pin_sites.clear();
  for (double p : parse_list(tree.get<std::string>("lattice.pins", "1")))
    c.lattice.pin_sites.push_back(static_cast<int>(p));
  const Eigen::Index n = c.lattice.length;
  const Eigen::Index m = c.lattice.num_pins();
  if (n < 1) throw std::invalid_argument("config [lattice]: length must be positive");

  c.noise_cov = diag_or_scalar(tree.get<std::string>("noise.covariance", "0.001"), n, "noise.covariance");

  c.model_source = parse_model_source(tree.get<std::string>("model.source", "analytic"));
  if (auto sigma = tree.get_optional<std::string>("model.sigma")) c.design_sigma = diag_or_scalar(*sigma, n, "model.sigma");
  c.sysid_samples = tree.get<long>("model.samples", c.sysid_samples);
  c.excitation_std = tree.get<double>("model.excitation_std", c.excitation_std);
  c.diagonal_sigma = parse_bool(tree.get<std::string>("model.diagonal_sigma", "true"));

  c.gamma = diag_or_scalar(tree.get<std::string>("design.gamma", "0.01"), m, "design.gamma");
  c.riccati.tol = tree.get<double>("design.tol", c.riccati.tol);
  c.riccati.max_iter = tree.get<int>("design.max_iter", c.riccati.max_iter);

  c.ctrb_horizon = tree.get<int>("controllability.horizon", c.ctrb_horizon);
  c.ctrb_bound_tol = tree.get<double>("controllability.bound_tol", c.ctrb_bound_tol);

  c.plant = parse_plant_kind(tree.get<std::string>("simulation.plant", "nonlinear"));
  c.x0 = vector_or_scalar(tree.get<std::string>("simulation.x0", "0.9"), n, "simulation.x0");
  c.steps = tree.get<int>("simulation.steps", c.steps);
  c.seed = tree.get<std::uint64_t>("simulation.seed", c.seed);
  c.deterministic_control = parse_bool(tree.get<std::string>("simulation.deterministic_control", "false"));

  c.validate();
  return c;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
    return from_tree(tree);
  } catch (const pt::ptree_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in);
}

}  // namespace cmlpin
