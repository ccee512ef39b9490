#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fuzzyfd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Environment variable that overrides the URL of the remote provider.
inline constexpr const char* kEmbedUrlEnv = "FUZZYFD_EMBED_URL";

// Runs the command line `args` (without the program name). Subcommands:
// match, integrate, eval, bench, generate. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace fuzzyfd
