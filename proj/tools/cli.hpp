#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bgsa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line `args` (without the program name) and returns the
// process exit code. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bgsa::cli
