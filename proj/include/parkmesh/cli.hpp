#pragma once

#include <iosfwd>

namespace parkmesh::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;       // bad arguments, unreadable files, failed validation
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitLimit = 3;       // node or time limit reached before a proof

// Entry point of the `parkmesh` tool; subcommands gen-grid, solve, pareto,
// validate and export-lp.  Output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace parkmesh::cli
