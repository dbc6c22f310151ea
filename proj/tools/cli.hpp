#pragma once

#include <ostream>

namespace edrdim::cli {

/// Runs the command line. Exit codes: 0 success, 2 invalid input or usage,
/// 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace edrdim::cli
