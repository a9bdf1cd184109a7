#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bnx::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kCapacity = 4,
  kMismatch = 5,
};

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bnx::cli
