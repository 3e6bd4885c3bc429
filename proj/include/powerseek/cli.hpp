#pragma once

#include <ostream>

namespace powerseek {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitAssumptionViolation = 2,
    kExitCounterexample = 3,
};

/// Entry point of the `powerseek` command.  Files go to --out-dir, or to
/// $POWERSEEK_OUT_DIR when the flag is absent; with neither, only the
/// console summary is produced.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace powerseek
