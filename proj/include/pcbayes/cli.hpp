#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcbayes::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr const char* kVersion = "1.0.0";

/// Runs one command line (args[0] is the program name). Messages go to out
/// and err; the return value is the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcbayes::cli
