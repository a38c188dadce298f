#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace admsim::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kIo = 2,
  kNumerical = 3,
};

/// Runs one invocation. args[0] is the program name. Reports go to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

} // namespace admsim::cli
