#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evrep::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kIo = 3;
inline constexpr int kValidation = 4;

/// Runs the `evrep` command line; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evrep::cli
