#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace symprop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Subcommands: estimate, pml, polyapprox, experiment, verify, probe, sample.
/// `args` excludes the program name. JSON goes to `out` unless --out names a
/// file; diagnostics go to `err`.
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace symprop::cli
