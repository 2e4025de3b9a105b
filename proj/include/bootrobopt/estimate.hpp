#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "bootrobopt/csv.hpp"
#include "bootrobopt/parallel.hpp"
#include "bootrobopt/panel.hpp"
#include "bootrobopt/resample.hpp"
#include "bootrobopt/stats.hpp"

namespace bootrobopt {

/// Mean vector and covariance matrix of one panel (or one replicate).
struct MomentEstimate {
    Eigen::VectorXd mu;     // d
    Eigen::MatrixXd sigma;  // d x d

    [[nodiscard]] Eigen::Index dim() const { return mu.size(); }
};

/// Per-replicate moment estimates plus the plan that produced them.
struct ReplicateEnsemble {
    std::vector<MomentEstimate> estimates;
    BootstrapSpec spec;

    [[nodiscard]] std::size_t size() const { return estimates.size(); }
    [[nodiscard]] Eigen::Index dim() const {
        return estimates.empty() ? 0 : estimates.front().dim();
    }
};

/// Elementwise empirical confidence box over ensemble moments at level gamma:
/// per coordinate of mu and per entry of sigma, the type-1 quantiles at
/// (1-gamma)/2 and 1-(1-gamma)/2. With diagonal_only set, off-diagonal
/// covariance entries are left unconstrained by in_region.
struct QuantileBoxRegion {
    double gamma = 0.0;
    Eigen::VectorXd mu_lo, mu_hi;
    Eigen::MatrixXd sigma_lo, sigma_hi;
    bool diagonal_only = false;
};

/// Sampling covariance of the mean estimator.
struct EstimationCovariance {
    Eigen::MatrixXd omega;  // d x d
};

/// Column means and unbiased (divisor T-1) sample covariance.
inline MomentEstimate sample_moments(const ReturnPanel& r) {
    const Eigen::Index T = r.values.rows();
    if (T < 2) throw std::invalid_argument("sample_moments: need at least 2 rows");
    MomentEstimate m;
    m.mu = r.values.colwise().mean();
    const Eigen::MatrixXd centered = r.values.rowwise() - m.mu.transpose();
    m.sigma = centered.transpose() * centered / static_cast<double>(T - 1);
    m.sigma = ((m.sigma + m.sigma.transpose()) / 2.0).eval();
    return m;
}

/// Moments of every bootstrap replicate of `r` under `spec`. Replicates may
/// be evaluated on up to `jobs` threads; results are independent of the
/// schedule because each replicate owns its seeded stream and output slot.
inline ReplicateEnsemble ensemble_moments(const ReturnPanel& r, const BootstrapSpec& spec,
                                          unsigned jobs = 1) {
    const std::size_t T = r.rows();
    ReplicateEnsemble ensemble;
    ensemble.spec = spec;
    ensemble.estimates.resize(spec.count);
    parallel_for(spec.count, jobs, [&](std::size_t i) {
        ensemble.estimates[i] = sample_moments(materialize(r, generate_indices(spec, T, i)));
    });
    return ensemble;
}

inline QuantileBoxRegion quantile_box(const ReplicateEnsemble& e, double gamma,
                                      bool diagonal_only = false) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("quantile_box: gamma must lie in (0,1)");
    if (e.size() < 2) throw std::invalid_argument("quantile_box: need at least 2 replicates");
    const Eigen::Index d = e.dim();
    const double lo_level = (1.0 - gamma) / 2.0;
    const double hi_level = 1.0 - lo_level;

    QuantileBoxRegion region;
    region.gamma = gamma;
    region.diagonal_only = diagonal_only;
    region.mu_lo.resize(d);
    region.mu_hi.resize(d);
    region.sigma_lo.resize(d, d);
    region.sigma_hi.resize(d, d);

    std::vector<double> buffer(e.size());
    auto bounds = [&](auto getter, double& lo, double& hi) {
        for (std::size_t i = 0; i < e.size(); ++i) buffer[i] = getter(e.estimates[i]);
        lo = type1_percentile(buffer, lo_level);
        hi = type1_percentile(buffer, hi_level);
    };

    for (Eigen::Index k = 0; k < d; ++k)
        bounds([k](const MomentEstimate& m) { return m.mu(k); }, region.mu_lo(k), region.mu_hi(k));
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            bounds([i, j](const MomentEstimate& m) { return m.sigma(i, j); },
                   region.sigma_lo(i, j), region.sigma_hi(i, j));
    return region;
}

/// Inclusive elementwise membership test against a quantile box.
inline bool in_region(const MomentEstimate& m, const QuantileBoxRegion& region) {
    const Eigen::Index d = region.mu_lo.size();
    if (m.dim() != d || m.sigma.rows() != d || m.sigma.cols() != d)
        throw std::invalid_argument("in_region: dimension mismatch");
    for (Eigen::Index k = 0; k < d; ++k)
        if (m.mu(k) < region.mu_lo(k) || m.mu(k) > region.mu_hi(k)) return false;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            if (region.diagonal_only && i != j) continue;
            if (m.sigma(i, j) < region.sigma_lo(i, j) || m.sigma(i, j) > region.sigma_hi(i, j))
                return false;
        }
    return true;
}

/// Covariance hygiene: symmetrize, eigendecompose, clip eigenvalues below
/// `floor` up to `floor`, reconstruct. The mean is untouched. Replicate
/// covariances from short resamples are routinely indefinite at rounding
/// scale; this keeps every utility evaluation well defined.
inline MomentEstimate psd_repair(const MomentEstimate& m, double floor_value = 1e-10) {
    const Eigen::Index d = m.sigma.rows();
    if (m.sigma.cols() != d) throw std::invalid_argument("psd_repair: sigma not square");
    const double scale = m.sigma.cwiseAbs().maxCoeff();
    const double asym = (m.sigma - m.sigma.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * (1.0 + scale))
        throw std::invalid_argument("psd_repair: sigma not symmetric within tolerance");
    const Eigen::MatrixXd sym = (m.sigma + m.sigma.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("psd_repair: eigendecomposition failed");
    Eigen::VectorXd eigenvalues = solver.eigenvalues();
    for (Eigen::Index i = 0; i < d; ++i)
        if (eigenvalues(i) < floor_value) eigenvalues(i) = floor_value;
    MomentEstimate out;
    out.mu = m.mu;
    out.sigma = solver.eigenvectors() * eigenvalues.asDiagonal() * solver.eigenvectors().transpose();
    out.sigma = ((out.sigma + out.sigma.transpose()) / 2.0).eval();
    return out;
}

/// Covariance of the mean estimator: sample covariance divided by T.
inline EstimationCovariance estimation_covariance(const ReturnPanel& r) {
    const auto T = static_cast<double>(r.rows());
    return EstimationCovariance{sample_moments(r).sigma / T};
}

/// Audit dump: one row per replicate, flattened mu then the upper triangle
/// of sigma (row-major, diagonal included).
inline void dump_ensemble_csv(const ReplicateEnsemble& e, std::ostream& os) {
    const Eigen::Index d = e.dim();
    os << "replicate";
    for (Eigen::Index k = 0; k < d; ++k) os << ",mu_" << k;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j) os << ",sigma_" << i << "_" << j;
    os << "\n";
    for (std::size_t r = 0; r < e.size(); ++r) {
        os << r;
        const auto& m = e.estimates[r];
        for (Eigen::Index k = 0; k < d; ++k) os << "," << fmt_g17(m.mu(k));
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = i; j < d; ++j) os << "," << fmt_g17(m.sigma(i, j));
        os << "\n";
    }
}

}  // namespace bootrobopt
