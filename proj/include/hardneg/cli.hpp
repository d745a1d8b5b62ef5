#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace hardneg::cli {

// Exit codes: 0 success, 1 domain error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Subcommands: generate, validate, simscore,
// importance, train, eval, shift-report.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace hardneg::cli
