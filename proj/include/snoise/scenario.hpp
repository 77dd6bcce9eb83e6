#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "snoise/config.hpp"
#include "snoise/error.hpp"

namespace snoise {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;

// ConfigError maps to 2, every other module error to 3.
int exit_code_for(ErrorCode code) noexcept;

struct ScenarioOutcome {
  int exit_code = kExitPass;
  std::size_t checks = 0;
  std::size_t failed = 0;
  std::filesystem::path report;
  std::vector<std::filesystem::path> files;  // CSV artifacts, in write order
};

// Runs the configured scenario, writes its CSV files and report.txt into
// out_dir and returns 0 when every check passes, 1 otherwise. Module errors
// propagate as snoise::Error.
ScenarioOutcome run_scenario(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace snoise
