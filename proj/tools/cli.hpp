#pragma once

#include <iosfwd>

namespace multithresh::cli {

// exit codes
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kDataError = 2;
inline constexpr int kCheckFailed = 3;

//! Parses argv, runs one subcommand and returns its exit code. Reports go to
//! out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace multithresh::cli
