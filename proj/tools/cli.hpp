#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fvcb::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitDivergence = 3,
};

/// Runs the fvcbfit command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fvcb::cli
