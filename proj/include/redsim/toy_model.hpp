#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "redsim/linalg.hpp"
#include "redsim/rng.hpp"
#include "redsim/spacetime.hpp"

namespace redsim::toy {

using spacetime::Point;
using spacetime::SpacelikeSurface;

// Hypersurface-indexed state assignment for one or two particles with
// classical world lines and point-like measuring devices. The state attached
// to a space-like surface depends only on which switched-on device points the
// surface has crossed; outcomes are drawn once, at first crossing, and kept
// in an event log keyed by the device, so that every later surface sees the
// same facts.
//
// One particle carries an arbitrary superposition a|+> + b|->. Two particles
// are supported in the strict-anticorrelation preparation
// (|1+,2-> - |1-,2+>)/sqrt(2), whose measurement rules this module encodes;
// the two outcomes of the pair are decided by a single shared coin.

struct WorldLine {
    Point origin;
    double velocity = 0.0; // |v| < 1
    double position_at(double t) const { return origin.x + velocity * (t - origin.t); }
};

struct Apparatus {
    std::string id;
    std::size_t particle = 0; // index of the measured particle
    Point location;
    bool on = true;
};

struct ScenarioConfig {
    std::vector<WorldLine> particles; // one or two
    std::vector<Apparatus> apparatuses;
    StateVector initial_state; // dim 2 (one particle) or dim 4 (two, singlet)
    SpacelikeSurface sigma0;

    /// Checks world-line speeds, apparatus placement on its particle's world
    /// line (within 1e-9), state dimension, and the two-particle preparation.
    void validate() const;

    const Apparatus& apparatus(const std::string& id) const;
    ScenarioConfig with_switch(const std::string& id, bool on) const;
};

/// Singlet-style two-particle scenario state (dim 4, basis |1+,2+>,
/// |1+,2->, |1-,2+>, |1-,2->).
StateVector two_particle_singlet();
StateVector two_particle_basis(int theta1_sign, int theta2_sign);
StateVector one_particle_state(Complex plus_amp, Complex minus_amp);

struct LoggedOutcome {
    int value; // +-1
    Point where;
};

/// Persistent record of stochastic outcomes, keyed by apparatus. Write-once:
/// re-recording a different value for the same apparatus throws.
class EventLog {
public:
    bool has(const std::string& id) const;
    const LoggedOutcome& at(const std::string& id) const;
    void record(const std::string& id, int value, const Point& where);

    /// Shared coin of the anticorrelated pair: +1 means particle 1 carries
    /// Theta = +1 (and particle 2 the opposite).
    std::optional<int> pair_branch() const { return pair_branch_; }
    void set_pair_branch(int particle1_value);

    const std::map<std::string, LoggedOutcome>& outcomes() const { return outcomes_; }

private:
    std::map<std::string, LoggedOutcome> outcomes_;
    std::optional<int> pair_branch_;
};

/// The state attached to `sigma`. Samples outcomes for newly crossed
/// switched-on devices into the log (through `rng`); deterministic once the
/// log is fixed. Idempotent: revisiting any surface re-derives the same state
/// from the log.
StateVector state_on_surface(const ScenarioConfig& cfg, const SpacelikeSurface& sigma,
                             EventLog& log, Rng& rng);

struct PropertyVerdict {
    bool definite = false;
    int value = 0; // meaningful only when definite
};

/// Past-light-cone attribution: the observable of particle `particle` is
/// definite at p iff the state on the surface made of p's past cone joined to
/// sigma0 is an eigenstate of it.
PropertyVerdict property_at(const Point& p, std::size_t particle, const ScenarioConfig& cfg,
                            EventLog& log, Rng& rng);

enum class ApparatusEvent { Ready, Plus, Minus };

/// The (always definite) pointer state of a device at time t on its world
/// line: Ready until the surface of that point has crossed its switched-on
/// interaction point, the registered outcome afterwards.
ApparatusEvent apparatus_event_at(const std::string& id, double t, const ScenarioConfig& cfg,
                                  EventLog& log, Rng& rng);

struct ParameterIndependenceStats {
    // p[side][g_other][outcome]: side 0 = left apparatus, 1 = right;
    // g_other 0/1: the other side's switch; outcome 0 -> +1, 1 -> -1.
    double p[2][2][2] = {};
    std::size_t trials = 0;
    std::size_t same_outcome_both_on = 0; // both-on trials with equal outcomes
};

/// Monte Carlo estimate of the outcome distribution at either side with the
/// other side's switch off/on. `cfg` must be a two-particle scenario with
/// exactly one apparatus per particle, both initially on.
ParameterIndependenceStats stats_parameter_independence(const ScenarioConfig& cfg,
                                                        std::size_t n_trials, Rng& rng);

enum class ClaimVerdict { Legitimate, Illegitimate };

/// An assertion about an outcome, made from within one history.
/// hypothetical_apparatus empty: the claim refers only to devices actually
/// present and on. Otherwise the claim supposes a device switched on at that
/// point.
struct CounterfactualClaim {
    std::optional<Point> hypothetical_apparatus;
    std::string fixed_outcome_id; // the registered outcome the claim leans on
    int asserted_outcome = 0;     // +-1
};

/// A claim is legitimate iff it relies only on facts fixed in the causal past
/// of what it asserts: no hypothetical device, or a hypothetical device lying
/// in the causal future of the registered outcome it builds on. A
/// hypothetical device space-like to (or preceding) that outcome is
/// illegitimate. Malformed claims throw.
ClaimVerdict counterfactual_classify(const CounterfactualClaim& claim, const ScenarioConfig& cfg,
                                     const EventLog& log);

/// Deterministic completion of the pair dynamics: a hidden value fixes every
/// outcome. Outcomes at the right-side device are tabulated for the
/// only-right-on and both-on configurations; the left outcome under both-on
/// is the opposite of the right one.
struct HiddenVariableModel {
    std::vector<int> only_right_outcome; // +-1 per hidden value
    std::vector<int> both_on_right_outcome;

    std::size_t size() const { return only_right_outcome.size(); }
    void validate() const;
    /// Hidden values giving +1 at the right device when only it is on.
    std::vector<std::size_t> plus_set() const;
    /// Subset of plus_set whose right outcome flips to -1 when the left
    /// device is also on. Empty means the model is local; validate() throws.
    std::vector<std::size_t> flip_set() const;
};

struct HvDisagreement {
    std::size_t lambda;
    int same_lambda_right;  // right outcome in the both-on world with this lambda
    int same_lambda_left;   // left outcome there
    std::vector<std::size_t> same_outcome_worlds; // both-on worlds keeping right = +1
    bool selection_includes_minus_worlds; // some selected world has only-right = -1
    int same_outcome_left_prediction;     // left outcome in the selected worlds
    bool criteria_disagree;
};

/// For every hidden value in flip_set: the same-hidden-value accessibility
/// rule and the same-registered-outcome rule predict different left outcomes.
std::vector<HvDisagreement> hv_counterfactual_demo(const HiddenVariableModel& model);

} // namespace redsim::toy
