#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace affsurf::cli {

// Exit codes: 0 success, 1 bad input or configuration, 2 numerical failure or threshold miss.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

// args excludes the program name. The summary line goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Folds `--config file.json` into the argument list; explicit flags take precedence.
std::vector<std::string> merge_config(const std::vector<std::string>& args);

}  // namespace affsurf::cli
