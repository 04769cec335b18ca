#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace redsim {

/// Pearson chi-squared statistic of observed counts against expected
/// probabilities. Zero-probability cells must have zero counts.
double chi2_statistic(std::span<const std::size_t> counts, std::span<const double> expected_probs);

/// Chi-squared statistic for homogeneity of two count vectors over the same
/// categories (2 x k contingency table). Degrees of freedom: (#nonempty cols - 1).
double chi2_homogeneity(std::span<const std::size_t> a, std::span<const std::size_t> b,
                        std::size_t* dof_out = nullptr);

/// Upper critical value of the chi-squared distribution (Wilson-Hilferty).
double chi2_critical(std::size_t dof, double significance);

/// Two-sided Kolmogorov-Smirnov distance between sorted samples and a CDF
/// evaluated at the sample points (continuous model).
double ks_statistic(std::span<const double> sorted_samples, std::span<const double> model_cdf_at_samples);

/// KS distance between an empirical distribution over discrete atoms and a
/// model probability vector over the same atoms (in atom order).
double ks_statistic_discrete(std::span<const std::size_t> counts, std::span<const double> model_probs);

/// Asymptotic two-sided KS critical value for n samples.
double ks_critical(std::size_t n, double significance);

/// z-quantile of the standard normal for small upper-tail probabilities
/// (Acklam-style rational approximation; adequate for test thresholds).
double normal_quantile(double p);

double binomial_stddev(double p, std::size_t n);

} // namespace redsim
