#pragma once

#include <iosfwd>

namespace puma {

/// Runs the puma command line. Exit codes: 0 success, 2 invalid input or
/// usage, 1 I/O failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace puma
