#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dla::cli {

inline constexpr const char* kVersion = "dlagrow 1.0.0";

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInvalidConfig = 2;
inline constexpr int kGrowthFailure = 3;

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dla::cli
