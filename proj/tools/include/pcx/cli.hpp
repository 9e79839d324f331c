#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs `pcx <args...>` (args exclude the program name). Subcommands: solve,
/// verify, compare, zoo.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Checks accepted by `verify --check`.
const std::vector<std::string>& known_checks();

}  // namespace pcx::cli
