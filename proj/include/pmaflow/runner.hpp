#pragma once

#include "pmaflow/config.hpp"

namespace pmaflow {

/// Stable name of a library failure mode, for failure.json and exit mapping.
std::string error_name(const Error& e);

/// Best-effort failure.json so a crashed run still leaves a machine-readable
/// trace next to its other outputs.
void write_failure_report(const std::string& out_dir, const std::string& config_hash,
                          const Error& e);

/// Executes the configured command, writing every output under cfg.out with
/// the config hash stamped into each file. Returns 0 when all asserted checks
/// pass and 1 when some reported check failed; configuration and runtime
/// errors are raised as exceptions for the caller to map to exit codes.
int run_command(const RunConfig& cfg);

}  // namespace pmaflow
