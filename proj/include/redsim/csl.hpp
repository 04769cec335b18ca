#pragma once

#include <vector>

#include "redsim/linalg.hpp"
#include "redsim/rng.hpp"

namespace redsim::csl {

// Stochastic reduction by a family of commuting hermitian operators A_i.
// The linear evolution is integrated by Euler-Maruyama as
//
//     dPsi = [ -i H dt + sum_i A_i dW_i - (gamma/2) sum_i A_i^2 dt ] Psi,
//
// with dW_i centered Gaussian of variance gamma * dt. Written this way the
// raw-ensemble mean of ||Psi||^2 is conserved, which is what makes the cooked
// reweighting ||Psi||^2 a probability density. Physical frequencies are the
// cooked ones: raw-noise trajectories carry ||Psi||^2 importance weights.
//
// Three sampling modes:
//  * Raw         — reference: plain raw noise, cooked statistics by weighting.
//  * Resampled   — raw noise plus weight-proportional branching whenever the
//                  effective sample size drops; an optimization of Raw.
//  * CookedDrift — noise means shifted per step by 2 gamma <A_i> dt, which
//                  draws each full trajectory directly from the cooked
//                  measure (states renormalized per step; weights unused).

enum class NoiseMode { Raw, Resampled, CookedDrift };

struct CslEnsembleMember {
    StateVector state;            // unnormalized in Raw mode
    double raw_weight = 1.0;      // importance weight relative to the raw measure
    double log_raw_density = 0.0; // accumulated log of the discretized raw
                                  // noise density (up to an additive constant)
    std::vector<std::vector<double>> noise_history; // per channel, if recorded
};

/// An eigenmanifold common to the whole commuting family.
struct Manifold {
    std::vector<double> eigenvalues; // one per operator, in family order
    Mat projector;
};

class CslProcess {
public:
    /// Validates that every A_i is hermitian and that all pairs commute
    /// (max-norm defects at most 1e-10); throws otherwise.
    CslProcess(Operator hamiltonian, std::vector<Operator> a_ops, double gamma);

    const Operator& hamiltonian() const { return h_; }
    const std::vector<Operator>& a_ops() const { return a_ops_; }
    double gamma() const { return gamma_; }
    const std::vector<Manifold>& manifolds() const { return manifolds_; }

    /// One Euler-Maruyama step.
    void step(CslEnsembleMember& member, double dt, Rng& rng,
              NoiseMode mode = NoiseMode::Raw, bool record_noise = false) const;

    /// <psi|P_sigma|psi> for every manifold (unnormalized).
    std::vector<double> manifold_weights(const StateVector& psi) const;

    /// Index of the manifold with the given eigenvalue tuple. Throws if none
    /// matches within the tolerance.
    std::size_t manifold_index(const std::vector<double>& eigenvalues, double tol = 1e-6) const;

private:
    Operator h_;
    std::vector<Operator> a_ops_;
    double gamma_;
    Mat drift_;                    // -i H - (gamma/2) sum A_i^2
    std::vector<Manifold> manifolds_;
};

struct CslRecord {
    double time;
    double raw_norm2_mean;   // plain ensemble mean of ||psi||^2 (Raw mode)
    double raw_norm2_stderr;
    std::vector<double> manifold_probs; // cooked probabilities, normalized
};

struct CslRunConfig {
    double total_time = 1.0;
    double dt = 1e-2;
    std::size_t n_members = 100;
    std::size_t n_records = 10; // evenly spaced in time, plus t = 0
    NoiseMode mode = NoiseMode::Raw;
    double resample_ess_fraction = 0.5; // Resampled mode threshold
    bool record_noise = false;
    double settled_threshold = 0.99; // manifold occupation that counts as reduced
};

struct CslRunResult {
    std::vector<CslRecord> records;
    /// Cooked-weighted fraction of members that ended settled in each
    /// manifold; entries need not sum to 1 if some members are unsettled.
    std::vector<double> final_frequencies;
    double final_effective_sample_size;
    std::vector<CslEnsembleMember> members;
};

CslRunResult csl_run(const StateVector& initial, const CslProcess& process,
                     const CslRunConfig& config, Rng& rng);

/// Coupling strength that reproduces the hit dynamics: lambda (4 pi / alpha)^(3/2).
double grw_equivalent_gamma(double lambda, double alpha);

/// Smeared mass-density operators on a finite lattice of site positions, for
/// distinguishable particles in first quantization (Hilbert space =
/// (sites)^(particles), diagonal in the occupation basis). One hermitian
/// operator per site r: M(r) = sum_k mass_k * N_k(r), with N_k(r) the
/// Gaussian number operator of inverse squared width alpha
/// (1D prefactor (alpha/2pi)^(1/2)). All returned operators commute.
std::vector<Operator> mass_density_ops(const std::vector<double>& site_positions,
                                       const std::vector<double>& particle_masses, double alpha);

} // namespace redsim::csl
