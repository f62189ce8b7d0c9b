#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qtm4f::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 2;
inline constexpr int kDomainError = 3;

// Runs one invocation. args[0] is the program name. Results go to the
// --output file when given, otherwise to out; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qtm4f::cli
