#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace maestro {

/// Exit codes shared by every subcommand.
inline constexpr int kExitHolds = 0;
inline constexpr int kExitFails = 1;
inline constexpr int kExitError = 2;

/// Environment variable holding the default `check --limit`.
inline constexpr const char* kLimitEnv = "MAESTRO_CHECK_LIMIT";

/// Runs the `maestro` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maestro
