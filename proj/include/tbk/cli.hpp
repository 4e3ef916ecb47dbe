#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tbk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCapacity = 3;
inline constexpr int kExitNumeric = 4;

/// Command-line entry point.  `args` excludes the program name.  Writes the
/// subcommand's payload files plus manifest.json into --out and echoes the
/// primary JSON document to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tbk
