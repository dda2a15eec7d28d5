#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spiralpaste {

enum ExitCode : int {
  kExitOk = 0,
  kExitContract = 1,  // a measured quantity violated its bound
  kExitInput = 2,     // unreadable or invalid input, bad flags
  kExitOverflow = 3,  // the radii schedule left double range
};

/// Runs one subcommand. `args` excludes the program name. Reports go to the
/// --out file when given, otherwise to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spiralpaste
