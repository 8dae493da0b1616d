#pragma once

#include <iosfwd>

namespace cseg::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kMissingInput = 3;
inline constexpr int kEmptyCalibration = 4;
inline constexpr int kInternalError = 1;

/// Runs one command line. Normal output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cseg::cli
