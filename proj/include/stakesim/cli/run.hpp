#pragma once

#include <ostream>

#include "stakesim/cli/config.hpp"
#include "stakesim/cli/output.hpp"

namespace stakesim::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitConfigError = 2,
  kExitIoError = 3,
};

struct JobOutput {
  Table table;
  ExitCode exit_code = kExitOk;
};

/// Runs the configured job. Warnings (threshold saturation, ignored settings)
/// go to `diag`. Throws ConfigError for jobs the parameters cannot support.
JobOutput run_job(const ExperimentConfig& config, unsigned threads, std::ostream& diag);

/// Runs the job and writes the table in the configured format to `out`.
ExitCode run_to_stream(const ExperimentConfig& config, unsigned threads, std::ostream& out,
                       std::ostream& diag);

/// Runs the job and writes to config.out (standard output when empty).
/// Returns the process exit code; never throws.
int run(const ExperimentConfig& config, unsigned threads, std::ostream& diag);

}  // namespace stakesim::cli
