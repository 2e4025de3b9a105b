#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bootrobopt/csv.hpp"
#include "bootrobopt/stats.hpp"
#include "bootrobopt/strategy.hpp"

namespace bootrobopt {

/// Performance summary of one return series. Percent fields (expected
/// return, standard deviation, drawdowns, share of positive periods) are
/// stored in percent units; Sharpe and Sortino are plain annualized ratios.
/// Sharpe is empty when the realized standard deviation is (numerically)
/// zero, Sortino when the downside deviation is.
struct MetricReport {
    double expected_return = 0.0;  ///< annualized, %
    double std_dev = 0.0;          ///< annualized, %
    std::optional<double> sharpe;
    std::optional<double> sortino;
    double avg_dd = 0.0;  ///< %, <= 0
    double max_dd = 0.0;  ///< %, <= 0
    double pct_positive = 0.0;
};

/// Per-metric difference test - train. Drawdown gaps additionally come as
/// |test| - |train| (a positive value = deeper out-of-sample drawdown),
/// since both sign conventions are in common use.
struct MetricGap {
    double expected_return = 0.0;
    double std_dev = 0.0;
    std::optional<double> sharpe;
    std::optional<double> sortino;
    double avg_dd = 0.0;
    double max_dd = 0.0;
    double pct_positive = 0.0;
    double avg_dd_abs = 0.0;
    double max_dd_abs = 0.0;
};

struct GapReport {
    MetricReport train;
    MetricReport test;
    MetricGap gap;
};

namespace detail {

inline bool near_zero(double value, double reference) {
    return value <= 1e-14 * (1.0 + std::abs(reference));
}

}  // namespace detail

/// Annualized performance metrics of a PnL series.
///
/// E[R] = mean * periods_per_year; Std = std * sqrt(periods_per_year) with
/// divisor n-1; Sharpe = mean/std * sqrt(periods_per_year); Sortino uses the
/// root-mean-square of min(r, 0) as downside deviation. Drawdowns are taken
/// on the compounded wealth path against its running maximum (which starts
/// at the initial wealth of 1): MaxDD is the deepest, AvgDD the average,
/// both <= 0.
inline MetricReport metrics(const PnlSeries& p, int periods_per_year) {
    const std::size_t n = p.values.size();
    if (n < 2) throw std::invalid_argument("metrics: need at least 2 return observations");
    const double ppy = static_cast<double>(periods_per_year);

    double mean = 0.0;
    for (const double r : p.values) mean += r;
    mean /= static_cast<double>(n);
    double ss = 0.0, downside_ss = 0.0;
    std::size_t positive = 0;
    for (const double r : p.values) {
        const double dev = r - mean;
        ss += dev * dev;
        const double down = std::min(r, 0.0);
        downside_ss += down * down;
        if (r > 0.0) ++positive;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double downside = std::sqrt(downside_ss / static_cast<double>(n));

    MetricReport m;
    m.expected_return = mean * ppy * 100.0;
    m.std_dev = sd * std::sqrt(ppy) * 100.0;
    if (!detail::near_zero(sd, mean)) m.sharpe = mean / sd * std::sqrt(ppy);
    if (!detail::near_zero(downside, mean)) m.sortino = mean / downside * std::sqrt(ppy);

    double peak = 1.0;
    double wealth = 1.0;
    double worst = 0.0, sum_dd = 0.0;
    for (const double r : p.values) {
        wealth *= 1.0 + r;
        peak = std::max(peak, wealth);
        const double dd = wealth / peak - 1.0;
        worst = std::min(worst, dd);
        sum_dd += dd;
    }
    m.max_dd = worst * 100.0;
    m.avg_dd = sum_dd / static_cast<double>(n) * 100.0;
    m.pct_positive = static_cast<double>(positive) / static_cast<double>(n) * 100.0;
    return m;
}

/// Generalization gap, test - train per metric; a gap is empty whenever
/// either side carries an undefined (sentinel) ratio.
inline GapReport gap(const MetricReport& train, const MetricReport& test) {
    GapReport g;
    g.train = train;
    g.test = test;
    g.gap.expected_return = test.expected_return - train.expected_return;
    g.gap.std_dev = test.std_dev - train.std_dev;
    if (train.sharpe && test.sharpe) g.gap.sharpe = *test.sharpe - *train.sharpe;
    if (train.sortino && test.sortino) g.gap.sortino = *test.sortino - *train.sortino;
    g.gap.avg_dd = test.avg_dd - train.avg_dd;
    g.gap.max_dd = test.max_dd - train.max_dd;
    g.gap.pct_positive = test.pct_positive - train.pct_positive;
    g.gap.avg_dd_abs = std::abs(test.avg_dd) - std::abs(train.avg_dd);
    g.gap.max_dd_abs = std::abs(test.max_dd) - std::abs(train.max_dd);
    return g;
}

/// Hyperparameter selection rule.
///   NpbPercentile(alpha): argmax of the alpha-th percentile of the
///     bootstrapped utilities.
///   Erm: argmax of the in-sample utility (list slot 0 by convention).
///   Cb1: argmax of the mean utility over asset-level bootstrap replicates.
///   Cb2: argmax of the mean utility over replicates of the realized
///     strategy-return series.
/// Cb1/Cb2 share the mean criterion; which resampling produced the lists is
/// the caller's responsibility.
struct SelectionRule {
    enum class Kind { NpbPercentile, Erm, Cb1, Cb2 };
    Kind kind = Kind::NpbPercentile;
    double alpha = 0.5;

    [[nodiscard]] std::string name() const {
        switch (kind) {
            case Kind::Erm: return "erm";
            case Kind::Cb1: return "cb1";
            case Kind::Cb2: return "cb2";
            case Kind::NpbPercentile: break;
        }
        return "p" + std::to_string(static_cast<int>(std::lround(alpha * 100.0)));
    }

    static SelectionRule parse(const std::string& s) {
        if (s == "erm") return {Kind::Erm, 0.0};
        if (s == "cb1") return {Kind::Cb1, 0.0};
        if (s == "cb2") return {Kind::Cb2, 0.0};
        if (!s.empty() && s.front() == 'p') {
            const int pct = std::stoi(s.substr(1));
            if (pct >= 1 && pct <= 99)
                return {Kind::NpbPercentile, static_cast<double>(pct) / 100.0};
        }
        throw std::invalid_argument("unknown selection rule: " + s);
    }
};

/// Apply a selection rule to per-hyperparameter utility lists. Ties resolve
/// to the smallest lookback (entries are scanned in ascending order with a
/// strict improvement test).
inline TsmomParams select_theta(
    const std::vector<std::pair<TsmomParams, std::vector<double>>>& utilities,
    const SelectionRule& rule) {
    if (utilities.empty()) throw std::invalid_argument("select_theta: empty grid");
    auto sorted = utilities;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    auto score = [&](const std::vector<double>& u) -> double {
        if (u.empty()) throw std::invalid_argument("select_theta: empty utility list");
        switch (rule.kind) {
            case SelectionRule::Kind::Erm:
                return u.front();
            case SelectionRule::Kind::NpbPercentile:
                return type1_percentile(u, rule.alpha);
            case SelectionRule::Kind::Cb1:
            case SelectionRule::Kind::Cb2: {
                double sum = 0.0;
                for (const double v : u) sum += v;
                return sum / static_cast<double>(u.size());
            }
        }
        return 0.0;
    };
    std::size_t best = 0;
    double best_score = score(sorted.front().second);
    for (std::size_t g = 1; g < sorted.size(); ++g) {
        const double s = score(sorted[g].second);
        if (s > best_score) {
            best_score = s;
            best = g;
        }
    }
    return sorted[best].first;
}

struct GaussianCi {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Cross-sectional Gaussian confidence interval:
/// mean +/- z_{(1+level)/2} * std / sqrt(n), std divisor n-1. The normal
/// quantile comes from the AS 241 routine in stats.hpp.
inline GaussianCi gaussian_ci(const std::vector<double>& values, double level) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("gaussian_ci: need at least 2 values");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("gaussian_ci: level must lie in (0,1)");
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double half = norm_quantile((1.0 + level) / 2.0) * sd / std::sqrt(static_cast<double>(n));
    return GaussianCi{mean, mean - half, mean + half};
}

/// Scale a series ex post to an annualized volatility target and recompound
/// the wealth path.
inline PnlSeries vol_target(const PnlSeries& p, double target_annual, int periods_per_year) {
    const std::size_t n = p.values.size();
    if (n < 2) throw std::invalid_argument("vol_target: need at least 2 observations");
    double mean = 0.0;
    for (const double r : p.values) mean += r;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const double r : p.values) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double realized = sd * std::sqrt(static_cast<double>(periods_per_year));
    if (detail::near_zero(sd, mean) || realized == 0.0)
        throw std::runtime_error("vol_target: zero realized volatility");
    const double scale = target_annual / realized;
    std::vector<double> scaled(n);
    for (std::size_t t = 0; t < n; ++t) scaled[t] = p.values[t] * scale;
    return PnlSeries::from_returns(p.dates, std::move(scaled));
}

// --- serialization ----------------------------------------------------------

inline constexpr const char* kUndefined = "undef";

inline std::string metric_csv_header() {
    return "expected_return,std_dev,sharpe,sortino,avg_dd,max_dd,pct_positive";
}

namespace detail {

inline std::string opt_field(const std::optional<double>& v) {
    return v ? fmt_g17(*v) : std::string(kUndefined);
}

}  // namespace detail

/// One CSV row in the metric_csv_header order; sentinel ratios render as the
/// literal string "undef".
inline std::string to_csv_row(const MetricReport& m) {
    return fmt_g17(m.expected_return) + "," + fmt_g17(m.std_dev) + "," +
           detail::opt_field(m.sharpe) + "," + detail::opt_field(m.sortino) + "," +
           fmt_g17(m.avg_dd) + "," + fmt_g17(m.max_dd) + "," + fmt_g17(m.pct_positive);
}

/// JSON object with the same fixed field order as the CSV row.
inline nlohmann::ordered_json to_json(const MetricReport& m) {
    nlohmann::ordered_json j;
    j["expected_return"] = m.expected_return;
    j["std_dev"] = m.std_dev;
    if (m.sharpe)
        j["sharpe"] = *m.sharpe;
    else
        j["sharpe"] = kUndefined;
    if (m.sortino)
        j["sortino"] = *m.sortino;
    else
        j["sortino"] = kUndefined;
    j["avg_dd"] = m.avg_dd;
    j["max_dd"] = m.max_dd;
    j["pct_positive"] = m.pct_positive;
    return j;
}

}  // namespace bootrobopt
