#pragma once

#include <iosfwd>

namespace levy_replenish {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInvalidSpec = 2,
  kExitNumerical = 3,
  kExitCheckFailed = 4,
};

/// Runs `levy-replenish <subcommand> [flags]`. Normal output goes to `out`, diagnostics to
/// `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace levy_replenish
