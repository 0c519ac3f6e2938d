#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vesseltop {

/// Process exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_internal = 3 };

/// Runs one command line (`args[0]` is the program name). Reports go to
/// `out` unless `--out` names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vesseltop
