#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace opinion::cli {

inline constexpr std::string_view tool_name = "opinion";
inline constexpr std::string_view tool_version = "0.1.0";

// Runs the command line `args` (args[0] is the program name). Data goes to
// `out`, diagnostics to `err`. Returns the process exit status.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace opinion::cli
