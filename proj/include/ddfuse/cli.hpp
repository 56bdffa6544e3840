#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddfuse::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseError = 2,
  kPairingError = 3,
  kNumericError = 4,
};

/// Runs the `ddfuse` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddfuse::cli
