#pragma once

#include <iosfwd>

namespace polytight {

enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitConfig = 2,
  kExitOracle = 3,
};

/// Entry point of the polytight command line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polytight
