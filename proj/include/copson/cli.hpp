#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace copson::cli {

enum ExitCode : int {
  kOk = 0,
  kFail = 1,
  kInconclusive = 2,
  kUsage = 64,
  kDataError = 65,
  kNumericFailure = 70,
};

/// Runs one command. args excludes the program name. The document goes to
/// `out` (or --out), diagnostics to `err` as single lines.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace copson::cli
