// commands.hpp: the experiment subcommands behind the qbm executable
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qbm_tools/config.hpp"

namespace qbm::tools {

// Each command writes its CSV files under config.output_dir and returns the
// paths it wrote. ValidationError and NumericalAlarm propagate.
std::vector<std::filesystem::path> run_kernel(const RunConfig& config);
std::vector<std::filesystem::path> run_sample_noise(const RunConfig& config, int threads);
std::vector<std::filesystem::path> run_classical(const RunConfig& config, int threads);
std::vector<std::filesystem::path> run_kubo(const RunConfig& config, int threads);
std::vector<std::filesystem::path> run_commutator(const RunConfig& config);

// `resolved_config` in the output directory.
std::filesystem::path write_resolved_config(const RunConfig& config);

} // namespace qbm::tools
