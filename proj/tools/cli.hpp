#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gbpd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// Runs one command line (args[0] is the program name). Normal output goes to
// `out`, diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gbpd::cli
