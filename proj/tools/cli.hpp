#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace udist::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitClaimFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the tool on argv-style arguments (without the program name) and
/// returns the exit status. Artifacts go to `out` unless an output path is
/// given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace udist::cli
