#pragma once

#include <iosfwd>

namespace biphoton {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitCompute = 3,
    kExitNotConverged = 4,
    kExitIo = 5,
};

/// Entry point of the `biphoton` tool: subcommands simulate, compare, fit
/// and synth. Reports go to `out`, errors to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace biphoton
