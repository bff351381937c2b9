#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sideinfo {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 2,
  kExitInconsistent = 3,
  kExitUsage = 64,
  kExitData = 65,
  kExitInternal = 70,
};

/// Runs one subcommand (args exclude the program name). The report goes to
/// `out` as a single JSON document, diagnostics to `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sideinfo
