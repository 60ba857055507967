#ifndef KICKHO_CLI_CLI_HPP
#define KICKHO_CLI_CLI_HPP

#include <ostream>

namespace kickho::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitFailure = 2;

/// Parses argv (argv[0] is the program name), runs one subcommand and
/// returns the process exit code. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kickho::cli

#endif
