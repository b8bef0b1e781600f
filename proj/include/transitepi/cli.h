#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace transitepi {

enum exit_code : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitRuntime = 4,
};

/// Runs the command line `args` (without the program name). Failures are
/// reported as one JSON line on `err`.
int run_cli(std::vector<std::string> const& args, std::ostream& out,
            std::ostream& err);

int run_cli(int argc, char const* const* argv);

}  // namespace transitepi
