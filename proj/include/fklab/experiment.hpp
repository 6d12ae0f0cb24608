#pragma once

#include <string>

#include "json.hpp"

namespace fklab {

/// Exit codes of the experiment runner. A FAIL verdict is still a successful
/// run; only malformed configs and violated contracts are errors.
enum class ExitCode : int {
  ok = 0,
  config_error = 2,
  precondition = 3,
  contract = 4,
};

struct ExperimentConfig {
  nlohmann::ordered_json doc;
  std::string output_dir;

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse(const nlohmann::ordered_json& doc);
};

/// Runs the experiment, writing summary.json plus per-curve CSV/SVG files
/// into the output directory. Deterministic for fixed (config, seed) except
/// for the timestamp field in the JSON header.
ExitCode run_experiment(const ExperimentConfig& config);

}  // namespace fklab
