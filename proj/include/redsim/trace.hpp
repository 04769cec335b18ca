#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "redsim/linalg.hpp"

namespace redsim::trace {

inline constexpr const char* kVersion = "0.1.0";

/// Digest of a state: amplitudes brought to canonical global phase (first
/// amplitude of nonnegligible magnitude made real and positive), rounded to
/// 12 decimal digits, serialized and FNV-1a hashed. Stable across runs and
/// insensitive to a global phase.
std::string state_digest(const StateVector& s);

/// The canonically-phased, rounded amplitudes behind the digest.
std::vector<Complex> canonical_amplitudes(const StateVector& s);

struct TraceRecord {
    std::string stage;
    std::string description;
    std::optional<std::string> state_digest;
    std::optional<std::vector<Complex>> amplitudes;
    std::string outcomes_json;      // serialized JSON or empty
    std::string probabilities_json; // serialized JSON or empty
};

struct RunTrace {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::vector<TraceRecord> records;
    std::string summary_json; // serialized JSON or empty
};

/// JSON-lines form: one metadata line, one line per record, one summary line.
void write_jsonl(const RunTrace& t, std::ostream& os);

} // namespace redsim::trace
