#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace invseq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. `args` excludes the program name. Returns the exit
/// code: 0 success or all checks passed, 1 a Monte Carlo check failed,
/// 2 usage or validation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace invseq::cli
