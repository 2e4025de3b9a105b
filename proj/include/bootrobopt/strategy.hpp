#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bootrobopt/panel.hpp"
#include "bootrobopt/parallel.hpp"
#include "bootrobopt/resample.hpp"

namespace bootrobopt {

/// Trend-following hyperparameters: signal lookback in trading days and an
/// optional scale applied to the unit-sign position.
struct TsmomParams {
    std::size_t lookback = 252;
    double forecast_scale = 1.0;
};

inline bool operator<(const TsmomParams& a, const TsmomParams& b) {
    if (a.lookback != b.lookback) return a.lookback < b.lookback;
    return a.forecast_scale < b.forecast_scale;
}

/// Proportional transaction costs per unit of traded weight. The entry into
/// the very first position is charged unless charge_initial_entry is false.
struct CostModel {
    Eigen::VectorXd tc;
    bool charge_initial_entry = true;

    static CostModel zero(Eigen::Index d) { return CostModel{Eigen::VectorXd::Zero(d), true}; }
    static CostModel proportional(Eigen::Index d, double rate) {
        return CostModel{Eigen::VectorXd::Constant(d, rate), true};
    }
};

/// Per-asset position weights, one row per panel row. The position in row t
/// earns the return of row t+1.
struct PositionSeries {
    Eigen::MatrixXd weights;  // T x d
};

/// Per-period portfolio returns plus the compounded wealth path.
/// wealth has one extra leading entry: wealth[0] = 1 and
/// wealth[t] = wealth[t-1] * (1 + values[t-1]).
struct PnlSeries {
    std::vector<std::string> dates;
    std::vector<double> values;
    std::vector<double> wealth;

    static PnlSeries from_returns(std::vector<std::string> dates, std::vector<double> values) {
        PnlSeries p;
        p.dates = std::move(dates);
        p.values = std::move(values);
        p.wealth.resize(p.values.size() + 1);
        p.wealth[0] = 1.0;
        for (std::size_t t = 0; t < p.values.size(); ++t)
            p.wealth[t + 1] = p.wealth[t] * (1.0 + p.values[t]);
        return p;
    }

    [[nodiscard]] std::size_t size() const { return values.size(); }
};

/// Time-series momentum positions. The signal at row t is the compounded
/// return of each asset over the window (t - lookback, t]; the position is
/// forecast_scale * sign(signal), zero on an exactly zero signal, and zero
/// before a full lookback window of observations exists.
inline PositionSeries tsmom_positions(const ReturnPanel& r, const TsmomParams& p) {
    const std::size_t T = r.rows();
    const std::size_t d = r.cols();
    if (p.lookback < 1) throw std::invalid_argument("tsmom_positions: lookback must be >= 1");
    if (T <= p.lookback)
        throw std::invalid_argument("tsmom_positions: need more rows than the lookback window");
    PositionSeries out;
    out.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(d));
    for (std::size_t t = p.lookback - 1; t < T; ++t) {
        for (std::size_t k = 0; k < d; ++k) {
            double compounded = 1.0;
            for (std::size_t s = t + 1 - p.lookback; s <= t; ++s)
                compounded *= 1.0 + r.values(static_cast<Eigen::Index>(s),
                                             static_cast<Eigen::Index>(k));
            const double signal = compounded - 1.0;
            double w = 0.0;
            if (signal > 0.0)
                w = p.forecast_scale;
            else if (signal < 0.0)
                w = -p.forecast_scale;
            out.weights(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = w;
        }
    }
    return out;
}

/// Backtest with linear transaction costs. The per-period portfolio return
/// booked at index t (earning the panel return of row t+1) is
///
///   sum_k w[t,k] * r[t+1,k] - sum_k tc_k * |w[t+1,k] - w[t,k]|
///
/// with the entry into w[0] additionally charged in the first period when
/// the cost model says so. Output has T-1 periods dated by the earning row.
inline PnlSeries backtest_pnl(const ReturnPanel& r, const PositionSeries& positions,
                              const CostModel& cost) {
    const auto T = static_cast<Eigen::Index>(r.rows());
    const auto d = static_cast<Eigen::Index>(r.cols());
    if (positions.weights.rows() != T || positions.weights.cols() != d)
        throw std::invalid_argument("backtest_pnl: position shape does not match panel");
    if (cost.tc.size() != d)
        throw std::invalid_argument("backtest_pnl: cost vector dimension mismatch");
    if ((cost.tc.array() < 0.0).any())
        throw std::invalid_argument("backtest_pnl: negative transaction cost");
    if (T < 2) throw std::invalid_argument("backtest_pnl: need at least 2 rows");

    std::vector<double> values(static_cast<std::size_t>(T - 1));
    for (Eigen::Index t = 0; t + 1 < T; ++t) {
        double ret = positions.weights.row(t).dot(r.values.row(t + 1));
        ret -= cost.tc.dot((positions.weights.row(t + 1) - positions.weights.row(t))
                               .cwiseAbs()
                               .transpose());
        if (t == 0 && cost.charge_initial_entry)
            ret -= cost.tc.dot(positions.weights.row(0).cwiseAbs().transpose());
        values[static_cast<std::size_t>(t)] = ret;
    }
    std::vector<std::string> dates(r.dates.begin() + 1, r.dates.end());
    return PnlSeries::from_returns(std::move(dates), std::move(values));
}

/// Single-asset forecast-scaled mean-variance utility with a transaction
/// penalty: scale * w * mu - (lambda/2) * sigma^2 * w^2 - tc * |w - prev_w|,
/// where w is the unit-sign position implied by the forecast (zero when the
/// scale or the forecast is zero).
inline double scaled_mvo_utility(double mu_star, double sigma_star, double tc_star, double prev_w,
                                 const TsmomParams& p, double lambda) {
    if (sigma_star < 0.0) throw std::invalid_argument("scaled_mvo_utility: negative sigma");
    double w = 0.0;
    if (p.forecast_scale != 0.0 && mu_star != 0.0) w = mu_star > 0.0 ? 1.0 : -1.0;
    return p.forecast_scale * w * mu_star - 0.5 * lambda * sigma_star * sigma_star * w * w -
           tc_star * std::abs(w - prev_w);
}

enum class StrategyUtility { Sharpe, NegMaxDrawdown };

inline std::string to_string(StrategyUtility u) {
    return u == StrategyUtility::Sharpe ? "sharpe" : "neg_maxdd";
}

namespace detail {

/// Utility of a PnL sub-series starting at `start`, in the same units as the
/// reporting metrics: annualized Sharpe, or the (negative) maximum drawdown
/// in percent so that larger is always better. A near-zero standard
/// deviation maps Sharpe to +/-infinity by the sign of the mean (a riskless
/// strategy dominates), 0 when the mean is also zero.
inline double pnl_utility(const std::vector<double>& values, std::size_t start,
                          StrategyUtility kind, int periods_per_year) {
    if (start + 2 > values.size())
        throw std::invalid_argument("pnl_utility: need at least 2 periods after warm-up");
    const std::size_t n = values.size() - start;
    if (kind == StrategyUtility::Sharpe) {
        double mean = 0.0;
        for (std::size_t t = start; t < values.size(); ++t) mean += values[t];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t t = start; t < values.size(); ++t) {
            const double dev = values[t] - mean;
            ss += dev * dev;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd <= 1e-14 * (1.0 + std::abs(mean))) {
            if (mean > 0.0) return std::numeric_limits<double>::infinity();
            if (mean < 0.0) return -std::numeric_limits<double>::infinity();
            return 0.0;
        }
        return mean / sd * std::sqrt(static_cast<double>(periods_per_year));
    }
    double wealth = 1.0;
    double peak = 1.0;
    double max_dd = 0.0;
    for (std::size_t t = start; t < values.size(); ++t) {
        wealth *= 1.0 + values[t];
        peak = std::max(peak, wealth);
        max_dd = std::min(max_dd, wealth / peak - 1.0);
    }
    return max_dd * 100.0;
}

}  // namespace detail

/// Bootstrapped utility table for a grid of strategy hyperparameters.
struct StrategyUtilityTable {
    std::vector<TsmomParams> grid;  ///< sorted ascending by lookback
    /// bootstrap_utilities[g][i]: utility of grid[g] on replicate i.
    std::vector<std::vector<double>> bootstrap_utilities;
    /// In-sample (identity-path) utility per grid entry.
    std::vector<double> insample;
    /// Hash of replicate i's index path; identical across every grid entry
    /// by construction (common random numbers).
    std::vector<std::uint64_t> path_hashes;
    /// First PnL index of the evaluation window (max lookback - 1), shared
    /// by all grid entries so candidates compete on identical periods.
    std::size_t eval_start = 0;
};

/// Evaluate every (hyperparameter, replicate) pair of the signal ->
/// positions -> costed backtest -> utility pipeline. One index path is drawn
/// per replicate and reused across the whole grid, so utility differences
/// between candidates are never confounded by sampling noise. Utilities are
/// computed on the common window that starts once the longest lookback in
/// the grid is warm.
inline StrategyUtilityTable bootstrap_strategy_utilities(const ReturnPanel& r,
                                                         std::vector<TsmomParams> grid,
                                                         const BootstrapSpec& spec,
                                                         const CostModel& cost,
                                                         StrategyUtility util, unsigned jobs = 1,
                                                         int periods_per_year = 252) {
    if (grid.empty()) throw std::invalid_argument("bootstrap_strategy_utilities: empty grid");
    std::sort(grid.begin(), grid.end());
    const std::size_t T = r.rows();
    std::size_t max_lookback = 0;
    for (const auto& p : grid) max_lookback = std::max(max_lookback, p.lookback);
    if (T <= max_lookback + 1)
        throw std::invalid_argument(
            "bootstrap_strategy_utilities: panel too short for the largest lookback");

    StrategyUtilityTable table;
    table.grid = grid;
    table.eval_start = max_lookback - 1;
    table.bootstrap_utilities.assign(grid.size(), std::vector<double>(spec.count, 0.0));
    table.insample.resize(grid.size());
    table.path_hashes.resize(spec.count);

    auto evaluate_panel = [&](const ReturnPanel& panel, std::size_t g) {
        const PnlSeries pnl = backtest_pnl(panel, tsmom_positions(panel, grid[g]), cost);
        return detail::pnl_utility(pnl.values, table.eval_start, util, periods_per_year);
    };

    for (std::size_t g = 0; g < grid.size(); ++g) table.insample[g] = evaluate_panel(r, g);

    parallel_for(spec.count, jobs, [&](std::size_t i) {
        const IndexPath path = generate_indices(spec, T, i);
        table.path_hashes[i] = path_hash(path);
        const ReturnPanel replicate = materialize(r, path);
        for (std::size_t g = 0; g < grid.size(); ++g)
            table.bootstrap_utilities[g][i] = evaluate_panel(replicate, g);
    });
    return table;
}

}  // namespace bootrobopt
