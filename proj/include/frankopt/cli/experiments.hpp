#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "frankopt/cli/config.hpp"

namespace frankopt::cli {

struct ExperimentOutcome {
  int exit_code = 0;  // 0 ok, 1 runtime failure
  std::filesystem::path directory;
  std::vector<std::string> files;  // relative to `directory`, in write order
  std::string error;
};

/// Runs a finalized config and writes its reports plus manifest.json and
/// config.yaml into output_directory(config). Progress lines go to `log`.
/// Outputs depend only on the config (never on `jobs` or wall time).
ExperimentOutcome run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace frankopt::cli
