#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cmlpin/experiment.hpp"

namespace cmlpin {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_states_csv(std::ostream& out, const Trajectory& traj);
void write_controls_csv(std::ostream& out, const Trajectory& traj);
void write_eigs_csv(std::ostream& out, const Spectrum& spectrum);
void write_report_txt(std::ostream& out, const ExperimentResult& result);

/// gain.csv (C), mcost.csv (M) and eigs.csv for a design.
void emit_design(const GainSolution& design, const std::filesystem::path& out_dir);

/// states.csv, controls.csv, gain.csv, mcost.csv, eigs.csv, report.txt.
/// Throws IoError naming the path on failure.
void emit_report(const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace cmlpin
