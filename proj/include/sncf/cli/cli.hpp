#pragma once

#include <ostream>
#include <span>
#include <string>

namespace sncf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

/// Runs one subcommand. `args` excludes the program name. Errors are printed
/// to `err` as a single line "sncf: error[<kind>]: <message>".
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sncf::cli
