#pragma once

#include <iosfwd>
#include <string>

namespace swimsim {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,      ///< invalid configuration or solver failure
    kExitViolation = 2,  ///< the run left the admissible set
};

// Each command writes its report to `out`, problems to `err`, and returns an ExitCode.
int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_picard(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_validate_mms(int cells, bool include_time, std::ostream& out, std::ostream& err);
int cmd_estimate_tstar(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_experiment(const std::string& name, const std::string& config_path, std::ostream& out, std::ostream& err);
/// `threads` <= 0 reads SWIMSIM_THREADS (default: hardware concurrency).
int cmd_sweep(const std::string& config_path, const std::string& results_path, int threads, std::ostream& out,
              std::ostream& err);

/// Worker count from SWIMSIM_THREADS, falling back to the hardware concurrency.
int thread_count_from_env();

}  // namespace swimsim
