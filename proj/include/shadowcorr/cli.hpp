#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shadowcorr::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kInternalError = 1,
    kBadInput = 2,
    kDegenerate = 3,
    kUnattainable = 4,
    kInsufficientEvents = 5,
};

/// Parses a grid given as "start:stop:step" (stop inclusive) or a comma list.
/// Throws ScenarioError for empty grids or points outside [-1, 1].
std::vector<double> parse_grid(const std::string& text);

/// Runs one invocation. args excludes the program name. Data goes to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shadowcorr::cli
