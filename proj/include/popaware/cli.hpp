// Command-line front end.
//
// Subcommands: run, sweep, analyze, validate.  Exit codes: 0 success,
// 2 usage error, 3 scenario parse error, 4 validation error, 5 runtime
// failure.  Every error prints one line to `err` starting with a greppable
// code (error[E_USAGE], error[E_PARSE], error[E_VALIDATION], error[E_RUNTIME]).

#pragma once

#include <ostream>

namespace popaware {

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace popaware
