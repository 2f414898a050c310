#pragma once

#include <iosfwd>

namespace imexrk {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,  // not certified, energy increase, or construction residual too large
  kExitUsage = 2,   // unparsable flags or input files
  kExitDiverged = 3,
  kExitUncertified = 4,
  kExitDegenerate = 5,
};

/// Entry point of the `imexrk` tool: analyze, simulate, converge, construct.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace imexrk
