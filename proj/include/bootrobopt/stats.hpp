#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bootrobopt/rng.hpp"

namespace bootrobopt {

/// Lower (type-1) empirical quantile: sort ascending, return the element at
/// 1-based rank ceil(alpha * n). Exact and interpolation-free; every quantile
/// in this library goes through here so ranks are consistent everywhere.
inline double type1_percentile(std::vector<double> values, double alpha) {
    if (values.empty()) throw std::invalid_argument("type1_percentile: empty list");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("type1_percentile: alpha must lie in (0,1)");
    const auto n = values.size();
    auto rank = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     values.end());
    return values[rank - 1];
}

/// 1-based rank used by type1_percentile for a list of length n.
inline std::size_t type1_rank(std::size_t n, double alpha) {
    auto rank = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return rank;
}

/// Standard normal quantile by Wichura's algorithm AS 241 (PPND16),
/// accurate to ~1e-15 over (0,1).
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("norm_quantile: p must lie in (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return q < 0.0 ? -value : value;
}

/// Regularized lower incomplete gamma P(a, x), via the power series for
/// x < a + 1 and the Lentz continued fraction for Q(a, x) otherwise.
inline double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_p: a must be positive");
    if (x < 0.0) throw std::invalid_argument("regularized_gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int n = 0; n < 1000; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(log_prefix);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(log_prefix) * h;
    double p = 1.0 - q;
    return std::clamp(p, 0.0, 1.0);
}

/// CDF of the chi-squared distribution with k degrees of freedom.
inline double chi2_cdf(double x, double k) {
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(k / 2.0, x / 2.0);
}

/// Density of the chi-squared distribution with k degrees of freedom.
inline double chi2_pdf(double x, double k) {
    if (x <= 0.0) return 0.0;
    const double half_k = k / 2.0;
    constexpr double ln2 = 0.6931471805599453094;
    return std::exp((half_k - 1.0) * std::log(x) - x / 2.0 - half_k * ln2 - std::lgamma(half_k));
}

/// Quantile of the chi-squared distribution with k degrees of freedom.
///
/// Inversion method: Wilson-Hilferty starting point, then safeguarded Newton
/// on the regularized incomplete gamma CDF with a bisection bracket.
/// Terminates at |CDF(x) - p| < 1e-13 or an interval of relative width 1e-14,
/// well inside 1e-8 absolute accuracy on the quantile.
inline double chi2_quantile(double p, double k) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chi2_quantile: p must lie in (0,1)");
    if (!(k >= 1.0)) throw std::invalid_argument("chi2_quantile: k must be >= 1");

    double lo = 0.0;
    double hi = k + 10.0 * std::sqrt(2.0 * k) + 10.0;
    while (chi2_cdf(hi, k) < p) {
        hi *= 2.0;
        if (hi > 1e12) break;
    }

    const double z = norm_quantile(p);
    const double c = 2.0 / (9.0 * k);
    double x = k * std::pow(1.0 - c + z * std::sqrt(c), 3.0);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);

    for (int iter = 0; iter < 200; ++iter) {
        const double f = chi2_cdf(x, k) - p;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        if (std::abs(f) < 1e-13) break;
        const double deriv = chi2_pdf(x, k);
        double next = deriv > 0.0 ? x - f / deriv : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-14 * (1.0 + x)) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

/// Standard normal draw by inverse-CDF transform of a pinned uniform draw.
/// Chosen over std::normal_distribution, whose algorithm the standard leaves
/// unspecified, so synthetic panels are reproducible across platforms.
inline double normal_draw(std::mt19937_64& rng) {
    return norm_quantile(uniform_open(rng));
}

}  // namespace bootrobopt
