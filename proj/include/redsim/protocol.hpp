#pragma once

#include <array>
#include <string>
#include <vector>

#include "redsim/linalg.hpp"
#include "redsim/measurement.hpp"
#include "redsim/rng.hpp"

namespace redsim::protocol {

// Measurement scheme for the total-isospin observables T_z and T² of a pair
// of far-apart spin-1/2-like particles, built from local couplings to
// entangled three-level probe pairs followed by local probe detections.
//
// Conventions, fixed once and used everywhere:
//  * Two-particle basis order: |uu>, |ud>, |du>, |dd> (particle 1 first).
//  * Probe levels are ordered (+1, 0, -1): index 0 <-> omega=+1, index 1 <->
//    omega=0, index 2 <-> omega=-1. Under this ordering probe_lower() is the
//    cyclic matrix [[0,0,1],[1,0,0],[0,1,0]] and probe_raise() its transpose.
//  * y eigenstates: |y+-> = (|u> +- i|d>)/sqrt(2).
//  * Tensor slot order of the full T² space (dimension 2916):
//    (particle 1, particle 2, probe 3, probe 6, probe 2*, probe 4*,
//     probe 3*, probe 6*).

inline constexpr Index kProbeDim = 3;
inline constexpr Index kSystemDim = 4;
inline constexpr Index kProbeTupleCount = 729; // 3^6
inline constexpr Index kFullDim = 2916;        // 4 * 729

enum class Axis { Z, Y };

/// omega eigenvalue of a probe basis index, and back.
int probe_omega(Index index);
Index probe_index(int omega);

/// Cyclic shift lowering omega by one step: |+1> -> |0> -> |-1> -> |+1>.
const Operator& probe_lower();
/// Cyclic shift raising omega by one step (adjoint of probe_lower).
const Operator& probe_raise();

/// Projector onto the +1 or -1 eigenstate of the chosen spin axis (2x2).
Operator spin_projector(Axis axis, int sign);

/// The entangled two-probe preparation: (|0,0> + |+1,-1> + |-1,+1>)/sqrt(3).
const StateVector& probe_pair_state();

/// Probe-pair state whose two outcomes always sum to 0 (tz = 0), to 1 or -2
/// (tz = +1), or to 2 or -1 (tz = -1). tz = 0 returns probe_pair_state().
const StateVector& pair_state_for_tz(int tz);

/// Two-particle system states.
StateVector system_basis(int index); // 0:|uu> 1:|ud> 2:|du> 3:|dd>
const StateVector& singlet_state();
const StateVector& triplet_z_state();
StateVector system_superposition(Complex a_uu, Complex b_ud, Complex c_du, Complex d_dd);

/// Total isospin observables on the 4-dim system space, in units where
/// T_z has eigenvalues {+1, 0, -1} and T² has eigenvalues {2, 0}.
const Operator& total_isospin_z();
const Operator& total_isospin_squared();
/// Projectors onto T_2z = +1 / -1 (the z component of particle 2).
std::vector<Operator> t2z_projectors();

/// The 6-dim coupling of one particle to one probe for the given axis:
/// P_{axis,+} (x) lower + P_{axis,-} (x) raise. Unitary.
Operator pair_coupling(Axis axis);

/// Dense unitary coupling both system particles to one probe pair, embedded
/// at the given slots of the product space described by dims. Throws if any
/// two slots collide.
Operator build_pair_unitary(Axis axis, const std::vector<Index>& dims,
                            std::size_t particle1_slot, std::size_t probe_a_slot,
                            std::size_t particle2_slot, std::size_t probe_b_slot);

// ---- T_z protocol (one probe pair) -----------------------------------------

/// Space (particle1, particle2, probe a, probe b), dimension 36.
const std::vector<Index>& tz_dims();
/// The z-axis coupling on tz_dims.
const Operator& tz_unitary();

/// Outcome-sum rule: 0 -> 0, {1, -2} -> +1, {2, -1} -> -1.
/// Any other sum is out of range and throws.
int classify_tz(int omega_sum);

struct TzResult {
    int omega3;
    int omega6;
    int omega_sum;
    int inferred_tz;
    StateVector reduced_system; // 4-dim, normalized
};

/// Couples the system to a fresh probe pair, detects both probes, classifies
/// the sum, and returns the reduced system state.
TzResult run_tz_protocol(const StateVector& system, Rng& rng);

// ---- T² protocol (three probe pairs) ---------------------------------------

/// Full-space factor dimensions (2,2,3,3,3,3,3,3).
const std::vector<Index>& t2_dims();

/// The three two-pair couplings on the full space, and their product, kept as
/// slot-embedded compositions (the 2916² matrix is never formed).
const CompositeOperator& u_z_full();      // z coupling to pair (3,6)
const CompositeOperator& u_y_full();      // y coupling to pair (2*,4*)
const CompositeOperator& u_z_star_full(); // z coupling to pair (3*,6*)
const CompositeOperator& u_total();       // z-star after y after z

/// The three-pair probe preparation (729-dim) and the full initial state.
const StateVector& probe_assembly_state();
StateVector full_initial(const StateVector& system);

/// U applied to (basis system state) x (probe assembly), cached.
const StateVector& u_total_branch(int system_basis_index);
/// U applied to (arbitrary system) x (probe assembly) by branch combination.
StateVector apply_u_total(const StateVector& system);

struct ProbeAssembly {
    std::vector<std::string> pair_ids; // {"3,6", "2*,4*", "3*,6*"}
    StateVector initial_state;         // 729-dim product of three pair states
};
ProbeAssembly make_probe_assembly();

enum class T2Class { Singlet, UpUp, DownDown, TripletZ };

/// Classification of a complete six-outcome record from the three pair sums
/// (3,6), (2*,4*), (3*,6*). A sum pattern that no branch of the evolved state
/// can produce throws (it would indicate an operator-construction bug).
T2Class classify_t2(int sum_36, int sum_24s, int sum_36s);

/// The reduced system state announced by each classification.
const StateVector& canonical_state(T2Class c);

std::string to_string(T2Class c);

struct T2Result {
    std::array<int, 6> omegas; // order: 3, 6, 2*, 4*, 3*, 6*
    T2Class classification;
    StateVector reduced_system; // 4-dim, normalized
};

/// Exact classification probabilities for a system state, in enum order
/// {Singlet, UpUp, DownDown, TripletZ}, computed from amplitudes.
std::array<double, 4> t2_class_probabilities(const StateVector& system);

/// Couples the system to all three probe pairs, detects the six probes,
/// classifies, and returns the reduced system state.
T2Result run_t2_protocol(const StateVector& system, Rng& rng);

// ---- Causality scenario -----------------------------------------------------

enum class NonlocalMode { None, Tz, T2 };

/// Starting from |uu>: optionally flip particle 1, optionally run the chosen
/// total-isospin measurement, then detect the z component of particle 2.
/// Returns +-1.
int signaling_scenario(bool flip, NonlocalMode mode, Rng& rng);

} // namespace redsim::protocol
