#pragma once

#include <iosfwd>

namespace causal_cues {

/// Exit codes: 0 success, 2 usage error, 3 data or identification error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace causal_cues
