#pragma once

#include <filesystem>
#include <iosfwd>

#include "cmlpin/experiment.hpp"

namespace cmlpin {

/// INI-style `key = value` file with [lattice], [noise], [model], [design],
/// [controllability] and [simulation] sections. See configs/fig1.ini.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

PlantKind parse_plant_kind(const std::string& s);
ModelSource parse_model_source(const std::string& s);
const char* to_string(PlantKind kind);
const char* to_string(ModelSource source);

}  // namespace cmlpin
