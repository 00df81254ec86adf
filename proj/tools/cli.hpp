#pragma once

#include "report.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace aford::cli {

inline constexpr const char* kToolName = "aford";
inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

/// Runs the command line `args` (without the program name). Results go to
/// `out` or to the file named by --out; errors are written to `err` as a
/// JSON object. Returns one of the exit codes above.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aford::cli
