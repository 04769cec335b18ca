#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "redsim/trace.hpp"

namespace redsim::scenarios {

// Named experiment runner behind the command-line tool. Scenario parameters
// travel as a JSON object (text form here, to keep this header light); every
// stochastic scenario requires an explicit seed.

struct ScenarioFile {
    std::string scenario;
    std::string params_json = "{}";
    std::optional<std::uint64_t> seed;
    std::size_t trials = 1;
    std::string output; // empty: discard, "-": stdout, else a file path
};

enum ExitCode : int { kOk = 0, kInvariantFailure = 1, kConfigError = 2 };

struct ScenarioResult {
    trace::RunTrace trace;
    int exit_code = kOk;
    std::string message; // human-readable status or error
};

const std::vector<std::string>& scenario_names();
bool needs_seed(const std::string& scenario, const std::string& params_json);

/// Parse a scenario file's JSON text. Throws std::invalid_argument with a
/// field-level diagnostic on malformed input.
ScenarioFile parse_scenario_file(const std::string& json_text);

/// Dispatch, run, summarize, and (if requested) write the JSON-lines trace.
ScenarioResult run_scenario(const ScenarioFile& file);

/// Build the summary record of a finished trace: frequency tables, chi²
/// statistics against the declared expectations, and pass/fail per invariant.
/// Returns JSON text. An empty trace yields an empty summary.
std::string emit_summary(const trace::RunTrace& t);

} // namespace redsim::scenarios
