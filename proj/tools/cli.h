#ifndef FPSHIELD_TOOLS_CLI_H_
#define FPSHIELD_TOOLS_CLI_H_

#include <iosfwd>

namespace fpshield::cli {

// Exit codes: 0 success, 1 domain error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one invocation. Everything the command prints goes to |out| and |err|,
// so tests can drive it in-process. `nbs proxy` runs until SIGINT or SIGTERM.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace fpshield::cli

#endif  // FPSHIELD_TOOLS_CLI_H_
