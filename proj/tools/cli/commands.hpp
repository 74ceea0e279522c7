#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace codemask::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kMissingFile = 3,
  kVersionMismatch = 4,
  kDataError = 5,
};

/// Runs one subcommand. `args` excludes the program name. Failures print a
/// single `error: code=<name> msg="<text>"` line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace codemask::cli
