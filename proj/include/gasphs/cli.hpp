#pragma once

#include <iosfwd>

namespace gasphs {

/// Exit status: 0 success, 1 model or run failure, 2 invalid input or usage.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gasphs
