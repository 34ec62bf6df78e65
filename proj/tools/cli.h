#ifndef COSMOS_TOOLS_CLI_H_
#define COSMOS_TOOLS_CLI_H_

#include <ostream>

namespace cosmos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

// Parses argv and runs one subcommand. Structured JSONL events go to
// `events` (or to --log-file when given); the human-readable summary and
// usage text go to `err`.
int Run(int argc, const char* const* argv, std::ostream& events, std::ostream& err);

}  // namespace cosmos::cli

#endif  // COSMOS_TOOLS_CLI_H_
