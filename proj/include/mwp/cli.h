// Command-line front end: generate, validate, score, correct.
#pragma once

#include <iosfwd>

namespace mwp {

// Returns the process exit code: 0 on success, 1 on validation or scoring
// failures and usage errors, 2 on provider failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mwp
