#pragma once

#include <span>
#include <vector>

#include "redsim/linalg.hpp"
#include "redsim/rng.hpp"

namespace redsim {

struct MeasurementOutcome {
    int outcome_index;
    double eigenvalue_label;
    double probability;
    StateVector post_state; // normalized projection onto the selected manifold
};

/// Projective measurement of a complete orthogonal projector family.
/// Outcome k is sampled with probability ||P_k s||²; the post state is the
/// normalized projection. The family must be mutually orthogonal and sum to
/// the identity within 1e-10, and s must be normalized; otherwise this throws.
/// Deterministic given the random source's state.
MeasurementOutcome measure_projective(const StateVector& s,
                                      const std::vector<Operator>& projectors, Rng& rng);
MeasurementOutcome measure_projective(const StateVector& s,
                                      const std::vector<Operator>& projectors,
                                      std::span<const double> eigenvalue_labels, Rng& rng);

/// Probability of each basis value of one tensor slot (marginal of |amps|²).
std::vector<double> slot_distribution(const StateVector& s, std::size_t slot);

/// Unnormalized projection of one slot onto a basis value.
StateVector project_slot(const StateVector& s, std::size_t slot, Index value);

/// Computational-basis measurement of a single tensor slot. Equivalent to
/// measure_projective with that slot's basis projectors, without forming
/// dim² matrices.
MeasurementOutcome measure_slot(const StateVector& s, std::size_t slot, Rng& rng);
MeasurementOutcome measure_slot(const StateVector& s, std::size_t slot,
                                std::span<const double> eigenvalue_labels, Rng& rng);

} // namespace redsim
