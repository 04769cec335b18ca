#include "redsim/grw.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace redsim::grw {

double GrwParams::rate_of(std::size_t particle) const {
    if (particle >= masses.size()) throw std::out_of_range("GrwParams: bad particle index");
    if (lambda <= 0.0 || alpha <= 0.0)
        throw std::invalid_argument("GrwParams: lambda and alpha must be positive");
    const double m = masses[particle];
    if (m < 0.0) throw std::invalid_argument("GrwParams: negative mass");
    return lambda * m;
}

double GrwParams::total_rate() const {
    double r = 0.0;
    for (std::size_t p = 0; p < masses.size(); ++p) r += rate_of(p);
    return r;
}

GridWavefunction::GridWavefunction(std::vector<Complex> amplitudes, Index points, double spacing,
                                   std::vector<double> origins)
    : amps_(std::move(amplitudes)), points_(points), spacing_(spacing),
      origins_(std::move(origins)) {
    if (points_ <= 0 || spacing_ <= 0.0)
        throw std::invalid_argument("GridWavefunction: bad grid");
    if (origins_.empty()) throw std::invalid_argument("GridWavefunction: no particles");
    Index expect = 1;
    for (std::size_t p = 0; p < origins_.size(); ++p) expect *= points_;
    if (static_cast<Index>(amps_.size()) != expect)
        throw std::invalid_argument("GridWavefunction: amplitude count != points^N");
}

GridWavefunction GridWavefunction::gaussian(Index points, double spacing, double origin,
                                            double center, double width) {
    if (width <= 0.0) throw std::invalid_argument("gaussian: width must be positive");
    std::vector<Complex> amps(static_cast<std::size_t>(points));
    for (Index j = 0; j < points; ++j) {
        const double x = origin + static_cast<double>(j) * spacing;
        const double d = x - center;
        amps[static_cast<std::size_t>(j)] = std::exp(-d * d / (4.0 * width * width));
    }
    return GridWavefunction(std::move(amps), points, spacing, {origin}).normalized();
}

GridWavefunction GridWavefunction::superpose(const GridWavefunction& a,
                                             const GridWavefunction& b, Complex c1, Complex c2) {
    if (a.points_ != b.points_ || a.spacing_ != b.spacing_ || a.origins_ != b.origins_)
        throw std::invalid_argument("superpose: grids differ");
    std::vector<Complex> amps(a.amps_.size());
    for (std::size_t k = 0; k < amps.size(); ++k) amps[k] = c1 * a.amps_[k] + c2 * b.amps_[k];
    return GridWavefunction(std::move(amps), a.points_, a.spacing_, a.origins_).normalized();
}

GridWavefunction GridWavefunction::product(const std::vector<GridWavefunction>& singles) {
    if (singles.empty()) throw std::invalid_argument("product: no factors");
    std::vector<double> origins;
    for (const auto& s : singles) {
        if (s.particles() != 1) throw std::invalid_argument("product: factors must be 1-particle");
        if (s.points_ != singles[0].points_ || s.spacing_ != singles[0].spacing_)
            throw std::invalid_argument("product: factor grids differ");
        origins.push_back(s.origins_[0]);
    }
    const Index g = singles[0].points_;
    Index total = 1;
    for (std::size_t p = 0; p < singles.size(); ++p) total *= g;
    std::vector<Complex> amps(static_cast<std::size_t>(total));
    for (Index flat = 0; flat < total; ++flat) {
        Index rem = flat;
        Complex v = 1.0;
        for (std::size_t p = singles.size(); p-- > 0;) {
            const Index j = rem % g;
            rem /= g;
            v *= singles[p].amps_[static_cast<std::size_t>(j)];
        }
        amps[static_cast<std::size_t>(flat)] = v;
    }
    return GridWavefunction(std::move(amps), g, singles[0].spacing_, std::move(origins));
}

double GridWavefunction::position(std::size_t particle, Index j) const {
    return origins_.at(particle) + static_cast<double>(j) * spacing_;
}

double GridWavefunction::norm2() const {
    double s = 0.0;
    for (const Complex& a : amps_) s += std::norm(a);
    double vol = 1.0;
    for (std::size_t p = 0; p < origins_.size(); ++p) vol *= spacing_;
    return s * vol;
}

GridWavefunction GridWavefunction::normalized() const {
    const double n = std::sqrt(norm2());
    if (n <= 0.0) throw std::runtime_error("cannot normalize a zero wavefunction");
    std::vector<Complex> amps(amps_.size());
    for (std::size_t k = 0; k < amps.size(); ++k) amps[k] = amps_[k] / n;
    return GridWavefunction(std::move(amps), points_, spacing_, origins_);
}

bool GridWavefunction::is_normalized(double tol) const {
    return std::abs(norm2() - 1.0) <= tol;
}

std::vector<double> GridWavefunction::marginal(std::size_t particle) const {
    if (particle >= particles()) throw std::out_of_range("marginal: bad particle");
    Index inner = 1;
    for (std::size_t p = particle + 1; p < particles(); ++p) inner *= points_;
    double vol = 1.0;
    for (std::size_t p = 0; p < particles(); ++p) vol *= spacing_;
    std::vector<double> m(static_cast<std::size_t>(points_), 0.0);
    for (std::size_t k = 0; k < amps_.size(); ++k) {
        const Index j = (static_cast<Index>(k) / inner) % points_;
        m[static_cast<std::size_t>(j)] += std::norm(amps_[k]) * vol;
    }
    return m;
}

double GridWavefunction::mass_in(std::size_t particle, double lo, double hi) const {
    const auto m = marginal(particle);
    double s = 0.0;
    for (Index j = 0; j < points_; ++j) {
        const double x = position(particle, j);
        if (x >= lo && x <= hi) s += m[static_cast<std::size_t>(j)];
    }
    return s;
}

std::vector<double> hit_center_density(const GridWavefunction& psi, std::size_t particle,
                                       double alpha) {
    // ||Phi_x||^2 = sqrt(alpha/pi) * sum_k exp(-alpha (x_k - x)^2) * marginal(k).
    // Distances between grid points depend only on the index difference, so a
    // single kernel table covers all pairs.
    const Index g = psi.points();
    const double h = psi.spacing();
    const auto m = psi.marginal(particle);
    std::vector<double> kernel(static_cast<std::size_t>(g));
    for (Index d = 0; d < g; ++d) {
        const double dx = static_cast<double>(d) * h;
        kernel[static_cast<std::size_t>(d)] = std::exp(-alpha * dx * dx);
    }
    const double pref = std::sqrt(alpha / std::numbers::pi);
    std::vector<double> w(static_cast<std::size_t>(g), 0.0);
    for (Index j = 0; j < g; ++j) {
        double acc = 0.0;
        for (Index k = 0; k < g; ++k)
            acc += kernel[static_cast<std::size_t>(std::abs(j - k))] *
                   m[static_cast<std::size_t>(k)];
        w[static_cast<std::size_t>(j)] = pref * acc;
    }
    return w;
}

std::pair<double, GridWavefunction> grw_hit(const GridWavefunction& psi, std::size_t particle,
                                            const GrwParams& params, Rng& rng) {
    if (particle >= psi.particles()) throw std::out_of_range("grw_hit: bad particle");
    if (!psi.is_normalized()) throw std::invalid_argument("grw_hit: state not normalized");

    auto w = hit_center_density(psi, particle, params.alpha);
    // centers that would leave no norm at machine precision are never drawn
    for (double& v : w)
        if (v < 1e-280) v = 0.0;
    const Index j = static_cast<Index>(rng.categorical(w));
    const double center = psi.position(particle, j);

    const Index g = psi.points();
    Index inner = 1;
    for (std::size_t p = particle + 1; p < psi.particles(); ++p) inner *= g;
    const double quarter = std::pow(params.alpha / std::numbers::pi, 0.25);
    std::vector<Complex> amps(psi.amplitudes());
    for (std::size_t k = 0; k < amps.size(); ++k) {
        const Index jk = (static_cast<Index>(k) / inner) % g;
        const double d = static_cast<double>(jk - j) * psi.spacing();
        amps[k] *= quarter * std::exp(-0.5 * params.alpha * d * d);
    }
    GridWavefunction hit(std::move(amps), g, psi.spacing(), psi.origins());
    return {center, hit.normalized()};
}

GrwTrajectory grw_evolve(const GridWavefunction& psi, double duration, const GrwParams& params,
                         Rng& rng) {
    if (duration < 0.0) throw std::invalid_argument("grw_evolve: negative duration");
    if (params.masses.size() != psi.particles())
        throw std::invalid_argument("grw_evolve: mass count != particle count");

    GrwTrajectory traj{{}, psi};
    const double total = params.total_rate();
    if (total <= 0.0) return traj;

    std::vector<double> rates(psi.particles());
    for (std::size_t p = 0; p < rates.size(); ++p) rates[p] = params.rate_of(p);

    double t = 0.0;
    GridWavefunction cur = psi;
    while (true) {
        t += rng.exponential(total);
        if (t >= duration) break;
        const std::size_t p = rng.categorical(rates);
        auto [center, next] = grw_hit(cur, p, params, rng);
        traj.hits.push_back({t, p, center});
        cur = std::move(next);
    }
    traj.final_state = std::move(cur);
    return traj;
}

double hit_probability(double lambda, double mass_ratio, double duration) {
    return -std::expm1(-lambda * mass_ratio * duration);
}

} // namespace redsim::grw
