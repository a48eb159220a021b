#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mathseed {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one invocation; args exclude the program name. Machine-readable
// results go to out, logs and diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mathseed
