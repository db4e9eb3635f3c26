#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace uavsim {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitParse = 2, kExitVerification = 3 };

/// Environment variable naming the config file used when --config is absent.
inline constexpr const char* kConfigEnvVar = "UAVSIM_CONFIG";

/// Entry point of the `uavsim` tool. `args` excludes the program name.
/// Subcommands: run, sweep, verify-chain.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uavsim
