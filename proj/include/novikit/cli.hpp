#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace novikit {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitInputError = 2 };

/// Runs the novikit command line; args[0] is the program name. Reports go to
/// `out`, diagnostics to `err`. Cutoff defaults come from NOVIKIT_ENERGY and
/// NOVIKIT_DEGREE when set.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace novikit
