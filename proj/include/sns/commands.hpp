#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "sns/config.hpp"

namespace sns {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitBlowUp = 3 };

struct CommandResult {
  int exit_code = kExitPass;
  std::string status;               ///< ok | pass | fail | blowup
  std::vector<std::string> files;   ///< data files written under cfg.out, manifest excluded
  std::vector<std::string> substreams;
  nlohmann::json report;            ///< in-memory copy of the main report
};

/// Each command validates its inputs, writes its data files and
/// manifest.json into cfg.out, and returns the outcome. Configuration
/// problems surface as ConfigError before anything is written.
CommandResult cmd_simulate(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_estimate(const RunConfig& cfg);
CommandResult cmd_toy(const RunConfig& cfg);

CommandResult run_command(const RunConfig& cfg);

/// Loads the initial field requested by cfg.initial; random fields come from
/// substream "initial".
SpectralField initial_field(const RunConfig& cfg);

}  // namespace sns
