#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fewshot::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericFailure = 3,
};

// args excludes the program name. Primary output goes to `out` unless a
// subcommand writes a file; diagnostics only ever go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fewshot::cli
