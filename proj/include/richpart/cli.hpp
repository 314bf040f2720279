#pragma once

#include <iosfwd>

namespace richpart {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitAlgorithm = 4;

/// Runs the `richpart` command line. Results go to `out` (or to --out),
/// diagnostics and usage text to `err`.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace richpart
