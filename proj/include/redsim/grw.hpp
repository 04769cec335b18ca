#pragma once

#include <utility>
#include <vector>

#include "redsim/linalg.hpp"
#include "redsim/rng.hpp"

namespace redsim::grw {

// Spontaneous-localization ("hit") dynamics on gridded one-dimensional
// wavefunctions. Hits multiply the wavefunction of one particle by a
// normalized Gaussian of inverse squared width alpha and renormalize; hit
// centers are distributed as the squared norm of the multiplied state, and
// hit times form independent Poisson processes with per-particle rates
// lambda * (m / m0).
//
// Everything here works in natural simulation units. Physical magnitudes
// (lambda ~ 1e-16 / s, 1 / sqrt(alpha) ~ 1e-5 cm) enter only through the
// rate helpers at the bottom.

struct GrwParams {
    double lambda = 1.0;          // hit rate of a unit-mass particle [1/time]
    double alpha = 1.0;           // inverse squared localization width
    std::vector<double> masses;   // per particle, in units of the reference mass

    double rate_of(std::size_t particle) const;
    double total_rate() const;
};

/// N particles on a shared uniform 1D grid (one origin per particle, common
/// spacing and point count). Amplitudes are stored over the product grid in
/// the usual row-major order, particle 0 most significant. The discrete norm
/// is sum |psi|^2 * spacing^N.
class GridWavefunction {
public:
    GridWavefunction(std::vector<Complex> amplitudes, Index points, double spacing,
                     std::vector<double> origins);

    /// Single normalized Gaussian lump exp(-(x-center)^2 / (4 width^2)).
    static GridWavefunction gaussian(Index points, double spacing, double origin,
                                     double center, double width);
    /// c1 * a + c2 * b on a common grid, renormalized.
    static GridWavefunction superpose(const GridWavefunction& a, const GridWavefunction& b,
                                      Complex c1, Complex c2);
    /// Product state of independent single-particle wavefunctions (same grid shape).
    static GridWavefunction product(const std::vector<GridWavefunction>& singles);

    std::size_t particles() const { return origins_.size(); }
    Index points() const { return points_; }
    double spacing() const { return spacing_; }
    const std::vector<double>& origins() const { return origins_; }
    const std::vector<Complex>& amplitudes() const { return amps_; }
    Index size() const { return static_cast<Index>(amps_.size()); }

    double position(std::size_t particle, Index j) const;

    double norm2() const;
    GridWavefunction normalized() const;
    bool is_normalized(double tol = 1e-8) const;

    /// Marginal position distribution of one particle (sums to 1 for a
    /// normalized state; includes the spacing^N volume element).
    std::vector<double> marginal(std::size_t particle) const;

    /// Probability mass within [lo, hi] for the given particle.
    double mass_in(std::size_t particle, double lo, double hi) const;

private:
    std::vector<Complex> amps_;
    Index points_;
    double spacing_;
    std::vector<double> origins_;
};

/// ||Phi_x||^2 for hit centers x on the particle's own grid: the density of
/// localization centers (a continuous density, evaluated at grid points).
std::vector<double> hit_center_density(const GridWavefunction& psi, std::size_t particle,
                                       double alpha);

/// One localization of `particle`: samples the center from ||Phi_x||^2,
/// multiplies by the Gaussian (1D prefactor (alpha/pi)^(1/4)) and
/// renormalizes. Centers whose multiplied state would vanish at machine
/// precision are excluded from sampling.
std::pair<double, GridWavefunction> grw_hit(const GridWavefunction& psi, std::size_t particle,
                                            const GrwParams& params, Rng& rng);

struct HitRecord {
    double time;
    std::size_t particle;
    double center;
};

struct GrwTrajectory {
    std::vector<HitRecord> hits;
    GridWavefunction final_state;
};

/// Poisson hit processes for all particles over [0, duration), hits applied
/// in time order. Free Hamiltonian propagation is deliberately absent.
GrwTrajectory grw_evolve(const GridWavefunction& psi, double duration, const GrwParams& params,
                         Rng& rng);

/// 1 - exp(-lambda * mass_ratio * duration).
double hit_probability(double lambda, double mass_ratio, double duration);

inline constexpr double kPhysicalLambdaPerSecond = 1e-16;
inline constexpr double kPhysicalAlphaPerCm2 = 1e10;
inline constexpr double kSecondsPerYear = 3.156e7;

} // namespace redsim::grw
