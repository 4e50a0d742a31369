#pragma once

#include <string>
#include <vector>

#include "armbench/config.hpp"

namespace arm {

/// Exit codes shared by all subcommands: 0 stable run, 1 configuration or
/// input error, 2 plant blow-up (outputs are still written).
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitUnstable = 2;

/// Runs one experiment and writes runlog.csv + metrics.csv to the out dir.
int cmd_run(const ExperimentConfig& config);

/// Runs every listed controller (crossed with any sweep axes) on the same
/// trajectory; writes one runlog per run plus a combined comparison.csv.
int cmd_compare(const ExperimentConfig& config);

/// Converts run logs to tidy long-format CSV (t,series,value) for plotting.
/// kind: cartesian | joint_pos | joint_vel | joint_torque.
int cmd_plotdata(const std::vector<std::string>& runlog_paths, const std::string& kind,
                 const std::string& out_path);

/// Validates config and model; prints violations.
int cmd_validate(const ExperimentConfig& config);

/// Full argv interface (the binary in tools/ is a thin wrapper around this).
int cli_main(int argc, const char* const* argv);

}  // namespace arm
