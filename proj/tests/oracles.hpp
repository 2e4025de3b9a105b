// Test-only oracles, deliberately independent of the library's numerics:
// the chi-squared CDF is integrated by adaptive Simpson quadrature of the
// density (vs. the library's series/continued-fraction incomplete gamma),
// quantiles are inverted by pure bisection, and optima are located by
// exhaustive grid search.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    // n must be even
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

/// Chi-squared(k) CDF by Simpson quadrature under the substitution x = u^2,
/// which removes the k < 2 endpoint singularity: the transformed integrand
/// u^{k-1} e^{-u^2/2} / (2^{k/2-1} Gamma(k/2)) is smooth for every k >= 1.
inline double chi2_cdf_quadrature(double x, double k) {
    if (x <= 0.0) return 0.0;
    const double log_norm = (k / 2.0 - 1.0) * std::log(2.0) + std::lgamma(k / 2.0);
    auto g = [k, log_norm](double u) {
        if (u <= 0.0) return k == 1.0 ? std::exp(-log_norm) : 0.0;
        return std::exp((k - 1.0) * std::log(u) - u * u / 2.0 - log_norm);
    };
    const double upper = std::sqrt(x);
    int n = 20000;
    double prev = simpson(g, 0.0, upper, n);
    for (int round = 0; round < 6; ++round) {
        n *= 2;
        const double cur = simpson(g, 0.0, upper, n);
        if (std::abs(cur - prev) < 1e-13) return cur;
        prev = cur;
    }
    return prev;
}

/// Quantile of chi-squared(k) by bisection on the quadrature CDF.
inline double chi2_quantile_bisect(double p, double k) {
    double lo = 0.0;
    double hi = std::max(1.0, k);
    while (chi2_cdf_quadrature(hi, k) < p) hi *= 2.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf_quadrature(mid, k) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Normal quantile by bisection on the erfc-based CDF.
inline double norm_quantile_bisect(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (norm_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Exhaustive maximization over the unit simplex {theta >= 0, sum = 1} in
/// d = 2 or d = 3, grid step h. Returns the best objective value found.
inline double simplex_grid_max(int d, double h,
                               const std::function<double(const Eigen::VectorXd&)>& objective) {
    const int steps = static_cast<int>(std::lround(1.0 / h));
    double best = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd theta(d);
    if (d == 2) {
        for (int i = 0; i <= steps; ++i) {
            theta(0) = static_cast<double>(i) / steps;
            theta(1) = 1.0 - theta(0);
            best = std::max(best, objective(theta));
        }
    } else if (d == 3) {
        for (int i = 0; i <= steps; ++i) {
            for (int j = 0; j <= steps - i; ++j) {
                theta(0) = static_cast<double>(i) / steps;
                theta(1) = static_cast<double>(j) / steps;
                theta(2) = 1.0 - theta(0) - theta(1);
                best = std::max(best, objective(theta));
            }
        }
    }
    return best;
}

/// Central finite-difference gradient.
inline Eigen::VectorXd central_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd hi = x, lo = x;
        hi(i) += h;
        lo(i) -= h;
        g(i) = (f(hi) - f(lo)) / (2.0 * h);
    }
    return g;
}

/// Sorted-copy percentile oracle: full sort, 1-based rank ceil(alpha * n).
inline double sort_percentile(std::vector<double> values, double alpha) {
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    auto rank = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return values[rank - 1];
}

}  // namespace oracle
