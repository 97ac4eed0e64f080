#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace symtop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitPartial = 4;

/// Environment variable consulted for the scan worker count when --workers is absent.
inline constexpr const char* kWorkersEnv = "SYMTOP_WORKERS";

/// Runs the command line `args` (program name excluded) and returns the exit code.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace symtop::cli
