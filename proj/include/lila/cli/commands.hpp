#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lila::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 2;

/// Runs one command line (args[0] is the program name). Returns the exit
/// code; diagnostics go to `err`, summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lila::cli
