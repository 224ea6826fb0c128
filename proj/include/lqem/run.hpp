#pragma once

#include <string>

#include "lqem/config.hpp"
#include "lqem/report.hpp"

namespace lqem {

/// Dispatches a loaded config to the matching solver, writes field outputs and
/// the JSON report into the output directory, and returns the report.
/// Modes: electro-radial, electro-grid, magneto, decompose, verify.
SolveReport run_case(RunConfig& config);

/// Exit-status contract: 0 iff the solve converged and all enabled checks pass.
int exit_status(const RunConfig& config, const SolveReport& report);

} // namespace lqem
