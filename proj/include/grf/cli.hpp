#pragma once

#include <iosfwd>

namespace grf {

// Entry point of the `grf` tool: train, select, predict, evaluate, simulate.
// Returns the process exit code; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace grf
