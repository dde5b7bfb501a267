#pragma once

#include "expsel/error.hpp"

namespace expsel {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitComputation = 3,
};

int exit_code_for(ErrorKind kind);

/// Entry point for the `expsel` executable: subcommands fit, select,
/// simulate, estimate-tau and diagnose.
int cli_main(int argc, const char* const* argv);

}  // namespace expsel
