#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "relaxmm/config.hpp"
#include "relaxmm/dynamics.hpp"

namespace relaxmm {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2 };

/// Pieces of a run assembled from a validated configuration.
BoundaryData make_boundary(const RunConfig& c, const CartesianGrid& g);
SourceTerms make_sources(const RunConfig& c, const CartesianGrid& g);
SimulationState make_initial(const RunConfig& c, const CartesianGrid& g);
RunSettings make_settings(const RunConfig& c);

/// Full command line (args[0] is the program name). Human-readable progress goes
/// to out; failures print one JSON object {"error": {...}} to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relaxmm
