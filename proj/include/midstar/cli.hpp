#pragma once

namespace midstar::cli {

/// Command-line driver.  Exit codes: 0 success, 2 validation/usage failure,
/// 3 non-convergent quadrature, 4 domain errors, 1 failed verification suite.
int run(int argc, const char* const* argv);

}  // namespace midstar::cli
