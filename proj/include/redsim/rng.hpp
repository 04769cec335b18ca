#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace redsim {

/// Seedable, splittable random source. Every stochastic operation in the
/// library takes one of these explicitly, so any run can be replayed
/// bit-exactly from its seed. Distributions are generated in-house (canonical
/// bits for uniforms, Box-Muller for Gaussians) on top of std::mt19937_64,
/// whose output sequence is fixed by the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Uniform in [0, 1), 53 random bits.
    double uniform();
    /// Uniform in [a, b).
    double uniform(double a, double b);

    /// Standard normal.
    double gaussian();
    double gaussian(double mean, double stddev);

    /// Exponential waiting time with the given rate.
    double exponential(double rate);

    bool bernoulli(double p_true);

    /// Index k with probability weights[k] / sum(weights).
    /// Weights must be nonnegative with a positive sum.
    std::size_t categorical(std::span<const double> weights);

    /// Sample an index from a cumulative distribution (last entry = total mass).
    std::size_t from_cdf(std::span<const double> cdf);

    /// Child source determined by the parent seed and a stream index, not by
    /// how much the parent has been consumed. Used to fan out Monte Carlo
    /// trials with independent, reproducible streams.
    Rng split(std::uint64_t stream) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace redsim
