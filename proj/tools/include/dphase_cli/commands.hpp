#pragma once

#include <iosfwd>

namespace dphase::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kNumericalError = 3,
  kNotConverged = 4,
};

/// Full command line (argv[0] included). Results go to `out`, diagnostics to
/// `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dphase::cli
