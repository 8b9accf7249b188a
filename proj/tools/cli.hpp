#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dagsel::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kNotConverged = 3,
  kIo = 4,
};

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out` (or the --out file), diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace dagsel::cli
