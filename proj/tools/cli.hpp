#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cardioreg::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kNumericalFailure = 3,
};

/// Runs one CLI invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Nine significant digits; integral values keep a trailing ".0".
std::string format_number(double v);

}  // namespace cardioreg::cli
