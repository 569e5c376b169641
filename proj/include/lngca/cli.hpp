#pragma once

#include <string>
#include <vector>

namespace lngca {

inline constexpr const char* kVersion = "0.1.0";

/// Runs the command line tool on args (without the program name).
/// Returns 0 on success, 2 for invalid input or flags, 1 for any other failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace lngca
