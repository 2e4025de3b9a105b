#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bootrobopt/estimate.hpp"
#include "bootrobopt/stats.hpp"

namespace bootrobopt {

/// Portfolio weight vector.
struct Weights {
    Eigen::VectorXd theta;
};

enum class ConstraintRegime { Unconstrained, LongOnly, LongShort };

/// Feasible set for portfolio weights.
///   LongOnly:  theta >= 0 elementwise, sum(theta) = budget.
///   LongShort: |theta_k| <= bound,     sum(theta) = budget.
///   Unconstrained: all of R^d (projection is the identity).
struct ConstraintSet {
    ConstraintRegime regime = ConstraintRegime::LongOnly;
    double budget = 1.0;
    double bound = 1.0;
};

/// Knobs shared by the robust optimizers: risk aversion lambda, utility
/// percentile level alpha, confidence-box level gamma, and the squared
/// ellipsoid radius kappa2 for the ellipsoidal robust counterpart.
struct RobustnessParams {
    double lambda = 1.0;
    double alpha = 0.25;
    double gamma = 0.75;
    double kappa2 = 0.0;
};

/// Projected (sub)gradient ascent schedule: step k uses
/// learning_rate * decay^k; iteration stops when the absolute objective
/// change falls below tolerance or max_iters is reached.
struct GradientAscentConfig {
    double learning_rate = 0.05;
    double decay = 0.999;
    double tolerance = 1e-8;
    std::size_t max_iters = 10000;
};

/// Outcome of an iterative solve. `weights` is the best iterate seen;
/// `converged` is false when the tolerance was never met within max_iters.
struct SolveResult {
    Weights weights;
    double objective = 0.0;
    bool converged = true;
    std::size_t iterations = 0;
};

/// Outcome of the chance-constrained solve. When no tested iterate satisfies
/// the percentile floor, `feasible` is false and `best_percentile` records
/// the highest percentile utility attained.
struct ChanceResult {
    SolveResult result;
    bool feasible = true;
    double best_percentile = -std::numeric_limits<double>::infinity();
};

/// Mean-variance utility theta'mu - (lambda/2) theta'Sigma theta.
inline double utility(const Weights& w, const MomentEstimate& m, double lambda) {
    if (w.theta.size() != m.dim()) throw std::invalid_argument("utility: dimension mismatch");
    return w.theta.dot(m.mu) - 0.5 * lambda * w.theta.dot(m.sigma * w.theta);
}

/// Type-1 empirical percentile of a utility sample (see stats.hpp).
inline double percentile(const std::vector<double>& values, double alpha) {
    return type1_percentile(values, alpha);
}

namespace detail {

inline std::vector<double> replicate_utilities(const Eigen::VectorXd& theta,
                                               const ReplicateEnsemble& e, double lambda) {
    std::vector<double> u(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto& m = e.estimates[i];
        u[i] = theta.dot(m.mu) - 0.5 * lambda * theta.dot(m.sigma * theta);
    }
    return u;
}

/// Index of the replicate realizing the type-1 percentile, lowest index on
/// utility ties.
inline std::size_t percentile_replicate(const std::vector<double>& utilities, double alpha) {
    const double value = type1_percentile(utilities, alpha);
    for (std::size_t i = 0; i < utilities.size(); ++i)
        if (utilities[i] == value) return i;
    return 0;  // unreachable: the percentile is an element of the list
}

/// Euclidean projection onto the simplex {theta >= 0, sum = budget}
/// (Held-Wolfe-Crowder / Duchi et al. sort-and-threshold).
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double budget) {
    const Eigen::Index d = v.size();
    std::vector<double> u(v.data(), v.data() + d);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double running = 0.0;
    double tau = 0.0;
    std::size_t support = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        running += u[j];
        const double candidate = (running - budget) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0) {
            tau = candidate;
            support = j + 1;
        }
    }
    if (support == 0) tau = (running - budget) / static_cast<double>(d);
    Eigen::VectorXd out(d);
    for (Eigen::Index k = 0; k < d; ++k) out(k) = std::max(v(k) - tau, 0.0);
    return out;
}

/// Euclidean projection onto {|theta_k| <= bound} intersected with
/// {sum = budget}: clamp(v - tau) with the shift tau found by bisection on
/// the monotone budget residual, then a one-pass polish distributing any
/// remaining residual over the unclamped coordinates. Exact KKT solution,
/// feasible to ~1e-14.
inline Eigen::VectorXd project_box_budget(const Eigen::VectorXd& v, double budget, double bound) {
    const Eigen::Index d = v.size();
    if (std::abs(budget) > bound * static_cast<double>(d) + 1e-12)
        throw std::invalid_argument("project: budget infeasible for the per-asset bound");
    auto clamped_sum = [&](double tau) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) s += std::clamp(v(k) - tau, -bound, bound);
        return s;
    };
    double lo = v.minCoeff() - bound - 1.0;
    double hi = v.maxCoeff() + bound + 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (clamped_sum(mid) > budget)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * (1.0 + std::abs(hi))) break;
    }
    const double tau = 0.5 * (lo + hi);
    Eigen::VectorXd out(d);
    std::size_t free_count = 0;
    for (Eigen::Index k = 0; k < d; ++k) {
        out(k) = std::clamp(v(k) - tau, -bound, bound);
        if (out(k) > -bound && out(k) < bound) ++free_count;
    }
    if (free_count > 0) {
        const double residual = budget - out.sum();
        const double shift = residual / static_cast<double>(free_count);
        for (Eigen::Index k = 0; k < d; ++k)
            if (out(k) > -bound && out(k) < bound)
                out(k) = std::clamp(out(k) + shift, -bound, bound);
    }
    return out;
}

}  // namespace detail

/// Euclidean projection onto the feasible set of `c`.
inline Weights project(const Weights& w, const ConstraintSet& c) {
    if (!w.theta.allFinite()) throw std::invalid_argument("project: non-finite weights");
    switch (c.regime) {
        case ConstraintRegime::Unconstrained:
            return w;
        case ConstraintRegime::LongOnly:
            return Weights{detail::project_simplex(w.theta, c.budget)};
        case ConstraintRegime::LongShort:
            return Weights{detail::project_box_budget(w.theta, c.budget, c.bound)};
    }
    return w;
}

/// Deterministic feasible starting point: equal weights projected onto the
/// constraint set.
inline Weights equal_weight_start(Eigen::Index d, const ConstraintSet& c) {
    Eigen::VectorXd theta = Eigen::VectorXd::Constant(d, c.budget / static_cast<double>(d));
    return project(Weights{theta}, c);
}

/// Subgradient of the percentile objective
/// P_alpha({theta'mu_i - (lambda/2) theta'Sigma_i theta}) at theta: the exact
/// gradient of the replicate realizing the percentile (lowest index on ties).
inline Eigen::VectorXd percentile_subgradient(const Weights& w, const ReplicateEnsemble& e,
                                              double lambda, double alpha) {
    if (e.size() == 0) throw std::invalid_argument("percentile_subgradient: empty ensemble");
    const auto utilities = detail::replicate_utilities(w.theta, e, lambda);
    const std::size_t active = detail::percentile_replicate(utilities, alpha);
    const auto& m = e.estimates[active];
    return m.mu - lambda * (m.sigma * w.theta);
}

namespace detail {

/// Shared projected-ascent driver. Tracks and returns the best iterate, so a
/// truncated run still yields the strongest point visited.
template <class Objective, class Gradient>
SolveResult projected_ascent(Eigen::VectorXd theta, const Objective& objective,
                             const Gradient& gradient, const ConstraintSet& c,
                             const GradientAscentConfig& g) {
    SolveResult res;
    Weights current{std::move(theta)};
    current = project(current, c);
    double f = objective(current.theta);
    res.weights = current;
    res.objective = f;
    res.converged = false;
    double step = g.learning_rate;
    std::size_t k = 0;
    for (; k < g.max_iters; ++k) {
        Weights next{current.theta + step * gradient(current.theta)};
        next = project(next, c);
        const double f_next = objective(next.theta);
        if (f_next > res.objective) {
            res.objective = f_next;
            res.weights = next;
        }
        const double change = std::abs(f_next - f);
        current = std::move(next);
        f = f_next;
        step *= g.decay;
        if (change < g.tolerance) {
            res.converged = true;
            ++k;
            break;
        }
    }
    res.iterations = k;
    return res;
}

}  // namespace detail

/// Plug-in mean-variance optimizer. Unconstrained, the maximizer is the
/// closed form Sigma^{-1} mu / lambda; under constraints, projected gradient
/// ascent from the projected equal-weight start.
inline SolveResult mvo_plugin(const MomentEstimate& m, double lambda, const ConstraintSet& c,
                              const GradientAscentConfig& g = {}) {
    if (!(lambda > 0.0)) throw std::invalid_argument("mvo_plugin: lambda must be positive");
    const Eigen::Index d = m.dim();
    if (c.regime == ConstraintRegime::Unconstrained) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(m.sigma);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("mvo_plugin: covariance factorization failed");
        Eigen::VectorXd theta = ldlt.solve(m.mu) / lambda;
        if (!theta.allFinite())
            throw std::runtime_error("mvo_plugin: singular covariance (repair it first)");
        // reject solutions of a numerically rank-deficient system
        const double residual = (m.sigma * (theta * lambda) - m.mu).norm();
        if (residual > 1e-6 * (1.0 + m.mu.norm()))
            throw std::runtime_error("mvo_plugin: singular covariance (repair it first)");
        Weights w{std::move(theta)};
        return SolveResult{w, utility(w, m, lambda), true, 0};
    }
    auto objective = [&](const Eigen::VectorXd& theta) {
        return theta.dot(m.mu) - 0.5 * lambda * theta.dot(m.sigma * theta);
    };
    auto gradient = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
        return m.mu - lambda * (m.sigma * theta);
    };
    return detail::projected_ascent(equal_weight_start(d, c).theta, objective, gradient, c, g);
}

/// Squared radius of the ellipsoidal uncertainty set at tail level alpha:
/// the (1 - alpha) quantile of the chi-squared distribution with d degrees
/// of freedom (see chi2_quantile for the inversion method).
inline double rpo_kappa(int d, double alpha) {
    if (d < 1) throw std::invalid_argument("rpo_kappa: d must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("rpo_kappa: alpha must lie in (0,1)");
    return chi2_quantile(1.0 - alpha, static_cast<double>(d));
}

/// Ellipsoidal robust mean-variance optimizer. Maximizes the exact robust
/// counterpart of the worst-case mean over the ellipsoid
/// {mu : (mu - mu_hat)' Omega^{-1} (mu - mu_hat) <= kappa2}:
///
///   mu_hat'theta - kappa * sqrt(theta'Omega theta) - (lambda/2) theta'Sigma theta
///
/// by projected gradient ascent; the penalty subgradient is taken as 0 where
/// theta'Omega theta vanishes.
inline SolveResult rpo(const MomentEstimate& m, const EstimationCovariance& omega, double kappa2,
                       double lambda, const ConstraintSet& c,
                       const GradientAscentConfig& g = {}) {
    if (kappa2 < 0.0) throw std::invalid_argument("rpo: kappa2 must be nonnegative");
    if (kappa2 == 0.0) return mvo_plugin(m, lambda, c, g);
    const double kappa = std::sqrt(kappa2);
    auto objective = [&](const Eigen::VectorXd& theta) {
        const double quad = theta.dot(omega.omega * theta);
        return theta.dot(m.mu) - kappa * std::sqrt(std::max(quad, 0.0)) -
               0.5 * lambda * theta.dot(m.sigma * theta);
    };
    auto gradient = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
        Eigen::VectorXd grad = m.mu - lambda * (m.sigma * theta);
        const Eigen::VectorXd omega_theta = omega.omega * theta;
        const double quad = theta.dot(omega_theta);
        if (quad > 1e-24) grad -= (kappa / std::sqrt(quad)) * omega_theta;
        return grad;
    };
    return detail::projected_ascent(equal_weight_start(m.dim(), c).theta, objective, gradient, c,
                                    g);
}

/// Bootstrap worst-case robust optimizer: maximizes the minimum replicate
/// utility over the replicates whose moment estimates fall inside the
/// gamma-level quantile box. Restricting the inner minimum to actual
/// replicates keeps the joint dependence between mean and covariance
/// estimates intact. The subgradient is the gradient of the active
/// (minimizing) replicate, lowest index on ties.
inline SolveResult bumvo_worstcase(const ReplicateEnsemble& e, double gamma, double lambda,
                                   const ConstraintSet& c, const GradientAscentConfig& g = {}) {
    if (e.size() == 0) throw std::invalid_argument("bumvo_worstcase: empty ensemble");
    std::vector<std::size_t> feasible;
    if (e.size() >= 2) {
        const auto region = quantile_box(e, gamma);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (in_region(e.estimates[i], region)) feasible.push_back(i);
    }
    if (feasible.empty()) {
        feasible.resize(e.size());
        std::iota(feasible.begin(), feasible.end(), std::size_t{0});
    }
    auto active_min = [&](const Eigen::VectorXd& theta) {
        std::size_t arg = feasible.front();
        double best = std::numeric_limits<double>::infinity();
        for (const std::size_t i : feasible) {
            const auto& m = e.estimates[i];
            const double u = theta.dot(m.mu) - 0.5 * lambda * theta.dot(m.sigma * theta);
            if (u < best) {
                best = u;
                arg = i;
            }
        }
        return std::pair<double, std::size_t>{best, arg};
    };
    auto objective = [&](const Eigen::VectorXd& theta) { return active_min(theta).first; };
    auto gradient = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
        const auto [value, active] = active_min(theta);
        (void)value;
        const auto& m = e.estimates[active];
        return m.mu - lambda * (m.sigma * theta);
    };
    return detail::projected_ascent(equal_weight_start(e.dim(), c).theta, objective, gradient, c,
                                    g);
}

/// Percentile-utility robust optimizer: maximizes the alpha-th percentile of
/// the replicate utility distribution by projected subgradient ascent from
/// the projected equal-weight start. Returns the best iterate; converged is
/// false when max_iters was exhausted before the objective settled.
inline SolveResult bumvo_percentile(const ReplicateEnsemble& e, const RobustnessParams& params,
                                    const ConstraintSet& c, const GradientAscentConfig& g = {}) {
    if (e.size() == 0) throw std::invalid_argument("bumvo_percentile: empty ensemble");
    auto objective = [&](const Eigen::VectorXd& theta) {
        return type1_percentile(detail::replicate_utilities(theta, e, params.lambda),
                                params.alpha);
    };
    auto gradient = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
        return percentile_subgradient(Weights{theta}, e, params.lambda, params.alpha);
    };
    return detail::projected_ascent(equal_weight_start(e.dim(), c).theta, objective, gradient, c,
                                    g);
}

/// Chance-constrained variant: maximizes the mean replicate utility subject
/// to P_alpha({U_i(theta)}) >= floor_c, via the exact penalty
/// mean - rho * max(0, floor_c - percentile) with rho escalated until the
/// constraint holds at the returned iterate or infeasibility is declared.
inline ChanceResult bumvo_chance(const ReplicateEnsemble& e, const RobustnessParams& params,
                                 double floor_c, const ConstraintSet& c,
                                 const GradientAscentConfig& g = {}) {
    if (e.size() == 0) throw std::invalid_argument("bumvo_chance: empty ensemble");
    const double lambda = params.lambda;
    const double alpha = params.alpha;

    auto pct = [&](const Eigen::VectorXd& theta) {
        return type1_percentile(detail::replicate_utilities(theta, e, lambda), alpha);
    };
    auto mean_utility = [&](const Eigen::VectorXd& theta) {
        const auto u = detail::replicate_utilities(theta, e, lambda);
        return std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(u.size());
    };
    auto mean_gradient = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(e.dim());
        for (const auto& m : e.estimates) grad += m.mu - lambda * (m.sigma * theta);
        return grad / static_cast<double>(e.size());
    };

    ChanceResult out;
    Eigen::VectorXd start = equal_weight_start(e.dim(), c).theta;
    double best_feasible_mean = -std::numeric_limits<double>::infinity();
    for (double rho = 1.0; rho <= 1e8; rho *= 10.0) {
        auto objective = [&](const Eigen::VectorXd& theta) {
            const double violation = std::max(0.0, floor_c - pct(theta));
            return mean_utility(theta) - rho * violation;
        };
        auto gradient = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
            Eigen::VectorXd grad = mean_gradient(theta);
            if (pct(theta) < floor_c)
                grad += rho * percentile_subgradient(Weights{theta}, e, lambda, alpha);
            return grad;
        };
        SolveResult res = detail::projected_ascent(start, objective, gradient, c, g);
        const double attained = pct(res.weights.theta);
        out.best_percentile = std::max(out.best_percentile, attained);
        if (attained >= floor_c) {
            const double mean_val = mean_utility(res.weights.theta);
            if (mean_val > best_feasible_mean) {
                best_feasible_mean = mean_val;
                out.result = res;
                out.result.objective = mean_val;
            }
            out.feasible = true;
            return out;
        }
        start = res.weights.theta;  // warm start the next penalty level
        out.result = res;
        out.result.objective = mean_utility(res.weights.theta);
    }
    out.feasible = false;
    return out;
}

}  // namespace bootrobopt
