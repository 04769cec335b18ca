#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "redsim/grw.hpp"
#include "redsim/stats.hpp"

using namespace redsim;
using namespace redsim::grw;

namespace {

// Closed-form center density for a lump pair: the Gaussian family integrated
// against two normalized lumps of width s at +-d/2 (cross term negligible for
// d >> s). Used as the independent oracle for the sampled-center law.
std::vector<double> two_lump_center_oracle(const GridWavefunction& psi, double alpha, double s,
                                           double d) {
    const double shrink = 1.0 + 2.0 * alpha * s * s;
    std::vector<double> p(static_cast<std::size_t>(psi.points()));
    for (Index j = 0; j < psi.points(); ++j) {
        const double x = psi.position(0, j);
        const double a = x + d / 2, b = x - d / 2;
        p[static_cast<std::size_t>(j)] =
            std::exp(-alpha * a * a / shrink) + std::exp(-alpha * b * b / shrink);
    }
    double total = 0.0;
    for (double v : p) total += v;
    for (double& v : p) v /= total;
    return p;
}

GridWavefunction make_two_lump(Index points, double spacing, double s, double d) {
    const double origin = -spacing * static_cast<double>(points - 1) / 2.0;
    const auto left = GridWavefunction::gaussian(points, spacing, origin, -d / 2, s);
    const auto right = GridWavefunction::gaussian(points, spacing, origin, d / 2, s);
    return GridWavefunction::superpose(left, right, 1.0, 1.0);
}

} // namespace

TEST_CASE("center density integrates to one") {
    const auto psi = make_two_lump(256, 0.15, 0.25, 20.0);
    const auto w = hit_center_density(psi, 0, 1.0);
    double total = 0.0;
    for (double v : w) total += v * psi.spacing();
    CHECK(std::abs(total - 1.0) <= 1e-6);
}

TEST_CASE("a localized state stays put under a hit") {
    GrwParams params{1.0, 1.0, {1.0}};
    const double s = 0.04; // much narrower than the localization width 1
    const auto psi = GridWavefunction::gaussian(512, 0.02, -2.12, 3.0, s);
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        Rng r = rng.split(trial);
        const auto [center, post] = grw_hit(psi, 0, params, r);
        CHECK(std::abs(center - 3.0) <= 3.0);
        double fidelity = 0.0;
        for (std::size_t k = 0; k < post.amplitudes().size(); ++k)
            fidelity += std::real(std::conj(post.amplitudes()[k]) * psi.amplitudes()[k]) *
                        psi.spacing();
        CHECK(fidelity > 0.99);
    }
}

TEST_CASE("two-lump state: even split, one surviving lump, oracle-shaped centers") {
    const double s = 0.25, d = 20.0, alpha = 1.0;
    const auto psi = make_two_lump(256, 0.15, s, d);
    GrwParams params{1.0, alpha, {1.0}};
    const auto oracle = two_lump_center_oracle(psi, alpha, s, d);

    Rng rng(42);
    const std::size_t n = 10000;
    std::vector<std::size_t> side_counts(2, 0);
    std::vector<std::size_t> center_counts(oracle.size(), 0);
    for (std::size_t trial = 0; trial < n; ++trial) {
        Rng r = rng.split(trial);
        const auto [center, post] = grw_hit(psi, 0, params, r);
        ++side_counts[center < 0 ? 0 : 1];
        const Index j =
            static_cast<Index>(std::lround((center - psi.position(0, 0)) / psi.spacing()));
        ++center_counts[static_cast<std::size_t>(j)];
        if (trial < 200) {
            CHECK(post.is_normalized());
            const double side_mass =
                center < 0 ? post.mass_in(0, -d, 0.0) : post.mass_in(0, 0.0, d);
            CHECK(side_mass > 0.999);
        }
    }
    CHECK(std::abs(side_counts[0] / double(n) - 0.5) <= 3.0 * binomial_stddev(0.5, n));
    CHECK(ks_statistic_discrete(center_counts, oracle) <= ks_critical(n, 0.001));
}

TEST_CASE("hit processes: counts, waiting times, and mass amplification") {
    GrwParams params{0.5, 1.0, {2.0}}; // per-particle rate 1.0
    const auto psi = GridWavefunction::gaussian(64, 0.3, -9.45, 0.0, 0.5);
    Rng rng(43);

    SUBCASE("Poisson count near its mean") {
        const auto traj = grw_evolve(psi, 100.0, params, rng);
        const double expected = 100.0;
        CHECK(std::abs(double(traj.hits.size()) - expected) <= 4.0 * std::sqrt(expected));
    }

    SUBCASE("inter-hit times are exponential at the configured rate") {
        const auto traj = grw_evolve(psi, 4000.0, params, rng);
        std::vector<double> gaps;
        double prev = 0.0;
        for (const auto& h : traj.hits) {
            gaps.push_back(h.time - prev);
            prev = h.time;
        }
        std::sort(gaps.begin(), gaps.end());
        std::vector<double> cdf(gaps.size());
        for (std::size_t k = 0; k < gaps.size(); ++k) cdf[k] = 1.0 - std::exp(-gaps[k]);
        CHECK(ks_statistic(gaps, cdf) <= ks_critical(gaps.size(), 0.001));
    }

    SUBCASE("N constituents amplify the total rate to N * lambda_m") {
        GrwParams multi{1.0, 1.0, {1.0, 1.0, 1.0}};
        std::vector<GridWavefunction> singles(
            3, GridWavefunction::gaussian(16, 0.5, -3.75, 0.0, 0.5));
        const auto lump = GridWavefunction::product(singles);
        const double duration = 400.0; // expected 1200 hits
        const auto traj = grw_evolve(lump, duration, multi, rng);
        const double expected = 3.0 * 1.0 * duration;
        CHECK(std::abs(double(traj.hits.size()) - expected) <= 4.0 * std::sqrt(expected));
        // each particle contributes its share
        std::vector<std::size_t> per(3, 0);
        for (const auto& h : traj.hits) ++per[h.particle];
        for (int p = 0; p < 3; ++p)
            CHECK(std::abs(double(per[p]) - expected / 3) <= 4.0 * std::sqrt(expected / 3));
    }
}

TEST_CASE("physical rate helper: one hit per billion years for a nucleon") {
    const double p = hit_probability(kPhysicalLambdaPerSecond, 1.0, kSecondsPerYear);
    CHECK(p == doctest::Approx(3.156e-9).epsilon(0.01));
    // and essentially certain localization for an Avogadro-sized lump in a
    // fraction of a second
    const double macro = hit_probability(kPhysicalLambdaPerSecond, 6e23, 1e-7);
    CHECK(macro > 0.99);
}

TEST_CASE("hits replay bit-exactly under a fixed seed") {
    const auto psi = make_two_lump(128, 0.3, 0.25, 20.0);
    GrwParams params{1.0, 1.0, {1.0}};
    Rng r1(7), r2(7);
    const auto a = grw_evolve(psi, 30.0, params, r1);
    const auto b = grw_evolve(psi, 30.0, params, r2);
    REQUIRE(a.hits.size() == b.hits.size());
    for (std::size_t k = 0; k < a.hits.size(); ++k) {
        CHECK(a.hits[k].time == b.hits[k].time);
        CHECK(a.hits[k].center == b.hits[k].center);
    }
}

TEST_CASE("degenerate hit parameters are rejected") {
    const auto psi = make_two_lump(64, 0.3, 0.25, 10.0);
    GrwParams bad{0.0, 1.0, {1.0}};
    Rng rng(9);
    CHECK_THROWS_AS(grw_evolve(psi, 1.0, bad, rng), std::invalid_argument);
    GrwParams params{1.0, 1.0, {1.0}};
    CHECK_THROWS_AS(grw_hit(psi, 1, params, rng), std::out_of_range);
}
