#include "redsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace redsim {

double chi2_statistic(std::span<const std::size_t> counts,
                      std::span<const double> expected_probs) {
    if (counts.size() != expected_probs.size())
        throw std::invalid_argument("chi2_statistic: size mismatch");
    std::size_t n = 0;
    for (auto c : counts) n += c;
    if (n == 0) throw std::invalid_argument("chi2_statistic: no observations");
    double stat = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double e = expected_probs[k] * static_cast<double>(n);
        if (e <= 0.0) {
            if (counts[k] != 0)
                throw std::invalid_argument("chi2_statistic: count in zero-probability cell");
            continue;
        }
        const double d = static_cast<double>(counts[k]) - e;
        stat += d * d / e;
    }
    return stat;
}

double chi2_homogeneity(std::span<const std::size_t> a, std::span<const std::size_t> b,
                        std::size_t* dof_out) {
    if (a.size() != b.size())
        throw std::invalid_argument("chi2_homogeneity: size mismatch");
    double na = 0, nb = 0;
    for (auto c : a) na += static_cast<double>(c);
    for (auto c : b) nb += static_cast<double>(c);
    if (na == 0 || nb == 0) throw std::invalid_argument("chi2_homogeneity: empty sample");
    double stat = 0.0;
    std::size_t nonempty = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double col = static_cast<double>(a[k]) + static_cast<double>(b[k]);
        if (col == 0.0) continue;
        ++nonempty;
        const double ea = col * na / (na + nb);
        const double eb = col * nb / (na + nb);
        const double da = static_cast<double>(a[k]) - ea;
        const double db = static_cast<double>(b[k]) - eb;
        stat += da * da / ea + db * db / eb;
    }
    if (dof_out) *dof_out = (nonempty == 0) ? 0 : nonempty - 1;
    return stat;
}

double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("normal_quantile: p out of range");
    // Acklam's approximation, relative error below 1.2e-9.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
        q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

double chi2_critical(std::size_t dof, double significance) {
    if (dof == 0) throw std::invalid_argument("chi2_critical: zero dof");
    const double z = normal_quantile(1.0 - significance);
    const double k = static_cast<double>(dof);
    // Wilson-Hilferty cube approximation.
    const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

double ks_statistic(std::span<const double> sorted_samples,
                    std::span<const double> model_cdf_at_samples) {
    const std::size_t n = sorted_samples.size();
    if (n == 0 || model_cdf_at_samples.size() != n)
        throw std::invalid_argument("ks_statistic: bad sizes");
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = model_cdf_at_samples[i];
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - f;
        const double lo = f - static_cast<double>(i) / static_cast<double>(n);
        d = std::max({d, hi, lo});
    }
    return d;
}

double ks_statistic_discrete(std::span<const std::size_t> counts,
                             std::span<const double> model_probs) {
    if (counts.size() != model_probs.size())
        throw std::invalid_argument("ks_statistic_discrete: size mismatch");
    double n = 0;
    for (auto c : counts) n += static_cast<double>(c);
    if (n == 0) throw std::invalid_argument("ks_statistic_discrete: no observations");
    double emp = 0.0, mod = 0.0, d = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        emp += static_cast<double>(counts[k]) / n;
        mod += model_probs[k];
        d = std::max(d, std::abs(emp - mod));
    }
    return d;
}

double ks_critical(std::size_t n, double significance) {
    if (n == 0) throw std::invalid_argument("ks_critical: empty sample");
    return std::sqrt(-std::log(significance / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

double binomial_stddev(double p, std::size_t n) {
    if (n == 0) throw std::invalid_argument("binomial_stddev: empty sample");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

} // namespace redsim
