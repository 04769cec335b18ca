#pragma once

#include <array>
#include <optional>
#include <vector>

#include "redsim/protocol.hpp"
#include "redsim/spacetime.hpp"

namespace redsim::staged {

using protocol::Axis;

// The T² measurement run surface by surface: the full coupling factors into
// one unitary acting on particle 2 and its three probes (crossed first, at
// the right wing) and a commuting one acting on particle 1 and the remaining
// probes. Between the two, the right-wing detectors reduce their three
// probes; the left detectors afterwards only register an already definite
// probe configuration.
//
// Slot order is shared with redsim::protocol:
// (particle 1, particle 2, probe 3, probe 6, probe 2*, probe 4*, probe 3*, probe 6*).

enum class Stage { Sigma0, Sigma1, Sigma2, Final };
enum class Side { Left, Right };

/// The per-particle factor: for Right, z/y/z couplings of particle 2 to
/// probes 6, 4*, 6* (in that application order); for Left the same pattern on
/// particle 1 with probes 3, 2*, 3*. The product Left*Right equals the full
/// protocol coupling; the two commute (disjoint slots).
const CompositeOperator& u_factor(Side side);

struct StagedState {
    Stage surface_tag = Stage::Sigma0;
    StateVector state; // 2916-dim, normalized at every stage
    std::optional<std::array<int, 3>> forced_outcomes; // omega of probes 6, 4*, 6*
};

/// (system) x (three probe pairs) on the initial surface. Defaults to the
/// anticorrelated system preparation.
StagedState initial_staged();
StagedState initial_staged(const StateVector& system);

/// Crossing the right interaction region: applies the particle-2 factor only.
StagedState evolve_sigma1(const StagedState& at_sigma0);

/// Right-wing detection of probes 6, 4*, 6*. The forced triple replays a
/// chosen outcome set and must have nonzero probability; the sampling
/// overload draws it.
StagedState reduce_right(const StagedState& at_sigma1, const std::array<int, 3>& forced);
StagedState reduce_right(const StagedState& at_sigma1, Rng& rng);

/// Probability of a forced triple in the given sigma1 state.
double forced_triple_probability(const StagedState& at_sigma1, const std::array<int, 3>& triple);

/// Crossing the left interaction region: applies the particle-1 factor, then
/// checks that the probe factor is a definite basis configuration (the left
/// detectors have nothing left to reduce). Throws if it is not.
StagedState evolve_final(const StagedState& at_sigma2);

/// Same crossing followed by explicit left-wing detection of probes 3, 2*,
/// 3*. For the anticorrelated preparation the detection is deterministic; for
/// other inputs it reduces whatever superposition survives.
StagedState evolve_final(const StagedState& at_sigma2, Rng& rng);

/// omega values of all six probes in a final state whose probe factor is a
/// basis configuration, in slot order 3, 6, 2*, 4*, 3*, 6*.
std::array<int, 6> read_probe_configuration(const StagedState& final_state);

/// The system factor of a final state (normalized, 4-dim).
StateVector system_factor(const StagedState& final_state);

struct RunRecord {
    Stage tag;
    StateVector state;
};

struct RunOutcome {
    std::array<int, 3> right_omegas; // probes 6, 4*, 6*
    std::array<int, 6> final_omegas; // probes 3, 6, 2*, 4*, 3*, 6*
    StateVector final_system;        // 4-dim
    std::vector<RunRecord> stages;
};

/// sigma0 -> sigma1 -> sigma2 -> final on the anticorrelated preparation,
/// with forced or sampled right-wing outcomes. Verifies that each probe pair
/// ends with outcomes summing to zero and the system in the anticorrelated
/// state; throws otherwise.
RunOutcome run_full(const std::optional<std::array<int, 3>>& forced, Rng& rng);

/// Same staged pipeline on an arbitrary system preparation; no zero-sum or
/// final-state assertions beyond probe definiteness.
RunOutcome run_staged(const StateVector& system, const std::optional<std::array<int, 3>>& forced,
                      Rng& rng);

/// Surface used to attribute joint properties to a pair of space-like
/// separated points: the boundary of their two past light cones joined with
/// the initial surface outside them.
spacetime::SpacelikeSurface pair_attribution_surface(const spacetime::Point& a,
                                                     const spacetime::Point& b,
                                                     const spacetime::SpacelikeSurface& initial);

enum class PairAttribution { DefiniteInitial, Indefinite, DefiniteFinal };

/// Whether the squared total isospin is definite on the surface attached to a
/// pair of query points, given the two interaction regions of the staged run.
/// Definite before both interactions (the preparation is an eigenstate) and
/// after both; indefinite while exactly one wing has been crossed.
PairAttribution t2_attribution(const spacetime::Point& query_a, const spacetime::Point& query_b,
                               const spacetime::Point& left_interaction,
                               const spacetime::Point& right_interaction,
                               const spacetime::SpacelikeSurface& initial);

} // namespace redsim::staged
