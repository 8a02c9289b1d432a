#pragma once

#include <iosfwd>

namespace mmdscan::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInvalidInput = 1;
inline constexpr int kRuntimeFailure = 2;

/// Runs `mmdscan <subcommand> ...`. Data goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mmdscan::cli
