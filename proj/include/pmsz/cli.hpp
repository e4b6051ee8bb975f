#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pmsz {

/// Exit codes: 0 ok, 1 usage or input error, 2 format error,
/// 3 decompressed field outside the bound, 4 no convergence.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitFormat = 2,
  kExitContract = 3,
  kExitConvergence = 4,
};

/// args[0] is the program name. Reports given as "-" go to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmsz
