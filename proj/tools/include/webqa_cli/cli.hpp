#pragma once

#include <exception>
#include <iosfwd>

namespace webqa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitContract = 2;
inline constexpr int kExitProvider = 3;
inline constexpr int kExitCap = 4;

// Runs one command line. Human summaries go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Exit status for an escaped exception.
int exit_code_for(const std::exception& error);

}  // namespace webqa::cli
