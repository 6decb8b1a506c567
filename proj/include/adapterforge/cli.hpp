#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace adapterforge::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAdaptable = 1;
inline constexpr int kExitIncompatible = 2;
inline constexpr int kExitError = 3;

/// Runs one invocation; `args` excludes the program name. Human and structured output go
/// to `out`, diagnostics to `err`. The pool falls back to ADAPTERFORGE_POOL.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adapterforge::cli
