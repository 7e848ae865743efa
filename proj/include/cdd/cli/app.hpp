#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cdd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailOn = 1;
inline constexpr int kExitError = 2;

/// Entry point of the `cdd` tool; argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace cdd::cli
