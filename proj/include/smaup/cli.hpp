#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smaup::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericalError = 3,
  kStall = 4,
};

/// Runs one command line (without the program name). Never throws; errors
/// are reported on `err` and through the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smaup::cli
