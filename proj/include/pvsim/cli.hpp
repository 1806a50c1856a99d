#pragma once

#include <iosfwd>

namespace pvsim::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1; ///< model or I/O failure
inline constexpr int exit_usage = 2;   ///< malformed invocation

/// Entry point of the `pvsim` command. Reports go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pvsim::cli
