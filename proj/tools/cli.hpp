#pragma once

// Command-line front end.  Exit codes: 0 success, 1 data error, 2 usage or
// parameter error.

#include <iosfwd>
#include <string>
#include <vector>

namespace quakestat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "QUAKESTAT_OUT_DIR";

/// Runs the command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace quakestat::cli
