#include "cmlpin/report.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "cmlpin/config.hpp"
#include "cmlpin/errors.hpp"

namespace cmlpin {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

namespace {

void write_time_series(std::ostream& out, const Matrix& rows, char prefix) {
  out << 't';
  for (Eigen::Index i = 1; i <= rows.cols(); ++i) out << ',' << prefix << i;
  out << '\n';
  for (Eigen::Index t = 0; t < rows.rows(); ++t) {
    out << t;
    for (Eigen::Index i = 0; i < rows.cols(); ++i) out << ',' << format_double(rows(t, i));
    out << '\n';
  }
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  writer(out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

void write_states_csv(std::ostream& out, const Trajectory& traj) { write_time_series(out, traj.states, 'x'); }

void write_controls_csv(std::ostream& out, const Trajectory& traj) { write_time_series(out, traj.controls, 'u'); }

void write_eigs_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "re,im\n";
  for (const auto& e : spectrum.eigenvalues) out << format_double(e.real()) << ',' << format_double(e.imag()) << '\n';
}

void write_report_txt(std::ostream& out, const ExperimentResult& r) {
  const auto& c = r.config;
  out << "a = " << format_double(c.lattice.a) << '\n';
  out << "epsilon = " << format_double(c.lattice.epsilon) << '\n';
  out << "length = " << c.lattice.length << '\n';
  out << "pins =";
  for (std::size_t i = 0; i < c.lattice.pin_sites.size(); ++i) out << (i ? ", " : " ") << c.lattice.pin_sites[i];
  out << '\n';
  out << "plant = " << to_string(c.plant) << '\n';
  out << "model = " << to_string(c.model_source) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "steps = " << c.steps << '\n';
  out << "deterministic_control = " << yes_no(c.deterministic_control) << '\n';

  const auto& d = r.design;
  out << "riccati_iterations = " << d.iterations << '\n';
  out << "riccati_residual = " << format_double(d.riccati_residual) << '\n';
  out << "lyapunov_residual = " << format_double(d.lyapunov_residual) << '\n';
  out << "spectral_radius = " << format_double(d.spectral_radius()) << '\n';
  out << "stabilizing = " << yes_no(d.stabilizing()) << '\n';
  out << "as_rank = " << d.as_rank << '\n';
  out << "assumption1 = " << yes_no(r.assumption1) << '\n';

  const auto& k = r.controllability;
  out << "ctrb_rank = " << k.det_rank.value_or(-1) << '\n';
  out << "det_controllable = " << yes_no(k.det_controllable.value_or(false)) << '\n';
  out << "sc_rank = " << k.sc_rank << '\n';
  out << "psi_pd = " << yes_no(k.psi_pd) << '\n';
  out << "psi_bounded = " << yes_no(k.psi_bounded) << '\n';
  out << "stochastically_controllable = " << yes_no(k.stochastically_controllable) << '\n';
  if (!k.psi_norm_sequence.empty())
    out << "psi_norm_last = " << format_double(k.psi_norm_sequence.back()) << '\n';

  const auto& t = r.trajectory;
  out << "diverged_at = " << (t.diverged_at ? std::to_string(*t.diverged_at) : std::string("none")) << '\n';
  if (t.sync_error.size() > 0) out << "final_sync_error = " << format_double(t.sync_error.tail(1)(0)) << '\n';
  out << "cost_to_go_constant = 0\n";
  for (const auto& w : r.warnings) out << "warning = " << w << '\n';
}

void emit_design(const GainSolution& design, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  write_file(out_dir / "gain.csv", [&](std::ostream& o) { write_matrix_csv(o, design.C); });
  write_file(out_dir / "mcost.csv", [&](std::ostream& o) { write_matrix_csv(o, design.Mcost); });
  write_file(out_dir / "eigs.csv", [&](std::ostream& o) { write_eigs_csv(o, design.spectrum); });
}

void emit_report(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  emit_design(result.design, out_dir);
  write_file(out_dir / "states.csv", [&](std::ostream& o) { write_states_csv(o, result.trajectory); });
  write_file(out_dir / "controls.csv", [&](std::ostream& o) { write_controls_csv(o, result.trajectory); });
  write_file(out_dir / "report.txt", [&](std::ostream& o) { write_report_txt(o, result); });
}

}  // namespace cmlpin
