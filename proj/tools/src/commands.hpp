#pragma once

#include <iosfwd>
#include <string>

#include "textchar/simulation.hpp"

namespace textchar::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// Entry point of the `textchar` tool. Reports go to files or `out`,
/// diagnostics and usage text to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// parameter,diversity,density,density_log,homogeneity
std::string scenario_to_csv(const ScenarioResult& result);

std::string scenario_to_svg(const ScenarioResult& result);

}  // namespace textchar::cli
