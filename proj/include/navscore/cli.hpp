#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace navscore::cli {

// Exit-code contract of the navscore executable.
enum ExitCode : int {
  kOk = 0,
  kDomainError = 1,  // schema errors, missing ids, unwritable output
  kUsageError = 2,   // bad flags or config
  kBackendUnavailable = 3,
};

// Runs the command line `args` (args[0] is the program name). Normal output
// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace navscore::cli
