#pragma once

// Command-line front end. Every subcommand writes one JSON report to stdout
// (or --out) and a short human summary to stderr.
//
// Exit status: 0 when every asserted contract held, 1 when a violation was
// found (listed in the report), 2 on usage errors.

#include <iosfwd>
#include <string>
#include <vector>

namespace cremona {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cremona
