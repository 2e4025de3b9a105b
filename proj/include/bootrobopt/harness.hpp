#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bootrobopt/estimate.hpp"
#include "bootrobopt/evaluate.hpp"
#include "bootrobopt/optimize.hpp"
#include "bootrobopt/panel.hpp"
#include "bootrobopt/parallel.hpp"
#include "bootrobopt/resample.hpp"
#include "bootrobopt/rng.hpp"
#include "bootrobopt/stats.hpp"
#include "bootrobopt/strategy.hpp"

namespace bootrobopt {

// --- synthetic data ----------------------------------------------------------

/// Gaussian AR(1) return panel with equicorrelated innovations, per-asset
/// drift and stationary volatility, and an optional regime shift that
/// multiplies the drift from a given fraction of the sample onward.
struct SyntheticSpec {
    std::size_t T = 1000;
    std::size_t d = 2;
    Eigen::VectorXd drift;  ///< per-period mean return per asset
    Eigen::VectorXd vol;    ///< per-period stationary standard deviation per asset
    double ar1 = 0.0;
    double cross_correlation = 0.0;
    double shift_fraction = -1.0;  ///< in (0,1) to enable the regime shift
    double shift_multiplier = 1.0;
    std::uint64_t seed = 42;

    static SyntheticSpec uniform(std::size_t T, std::size_t d, double drift_value,
                                 double vol_value) {
        SyntheticSpec s;
        s.T = T;
        s.d = d;
        s.drift = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), drift_value);
        s.vol = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), vol_value);
        return s;
    }
};

/// Synthetic strictly increasing ISO-8601-shaped date label for row i.
inline std::string synthetic_date(std::size_t i) {
    const unsigned year = static_cast<unsigned>(2000 + i / 372);
    const unsigned month = static_cast<unsigned>((i % 372) / 31 + 1);
    const unsigned day = static_cast<unsigned>((i % 372) % 31 + 1);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04u-%02u-%02u", year, month, day);
    return buf;
}

inline ReturnPanel generate_synthetic(const SyntheticSpec& spec) {
    const auto T = static_cast<Eigen::Index>(spec.T);
    const auto d = static_cast<Eigen::Index>(spec.d);
    if (T < 2 || d < 1) throw std::invalid_argument("generate_synthetic: need T >= 2, d >= 1");
    if (!(std::abs(spec.ar1) < 1.0))
        throw std::invalid_argument("generate_synthetic: |AR(1) coefficient| must be < 1");
    if (spec.drift.size() != d || spec.vol.size() != d)
        throw std::invalid_argument("generate_synthetic: drift/vol dimension mismatch");
    if ((spec.vol.array() <= 0.0).any())
        throw std::invalid_argument("generate_synthetic: volatilities must be positive");

    Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(d, d, spec.cross_correlation);
    corr.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument(
            "generate_synthetic: cross-correlation does not give a positive-definite matrix");
    const Eigen::MatrixXd chol = llt.matrixL();

    Eigen::Index shift_row = T;  // never reached unless enabled
    if (spec.shift_fraction > 0.0 && spec.shift_fraction < 1.0)
        shift_row = static_cast<Eigen::Index>(
            std::floor(spec.shift_fraction * static_cast<double>(T)));

    std::mt19937_64 rng(splitmix64(spec.seed));
    const double phi = spec.ar1;
    const double innovation_scale = std::sqrt(1.0 - phi * phi);

    ReturnPanel panel;
    panel.values.resize(T, d);
    panel.dates.reserve(spec.T);
    panel.assets.reserve(spec.d);
    for (Eigen::Index k = 0; k < d; ++k) panel.assets.push_back("A" + std::to_string(k));

    Eigen::VectorXd z(d);
    Eigen::VectorXd state(d);  // zero-mean AR component with unit stationary variance
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index k = 0; k < d; ++k) z(k) = normal_draw(rng);
        const Eigen::VectorXd shock = chol * z;
        if (t == 0)
            state = shock;  // draw from the stationary distribution
        else
            state = phi * state + innovation_scale * shock;
        const double drift_factor = t >= shift_row ? spec.shift_multiplier : 1.0;
        panel.values.row(t) =
            (drift_factor * spec.drift + spec.vol.cwiseProduct(state)).transpose();
        panel.dates.push_back(synthetic_date(static_cast<std::size_t>(t)));
    }
    return panel;
}

// --- portfolio experiment ----------------------------------------------------

/// One optimizer entry of the portfolio experiment. `level` is the utility
/// percentile for BumvoPercentile and the confidence-box level for
/// BumvoWorstcase; unused otherwise.
struct MethodSpec {
    enum class Kind { Ew, Mvo, Rpo, BumvoPercentile, BumvoWorstcase };
    Kind kind = Kind::Ew;
    double level = 0.0;

    [[nodiscard]] std::string label(ConstraintRegime regime) const {
        std::string suffix;
        switch (regime) {
            case ConstraintRegime::LongOnly: suffix = "lo"; break;
            case ConstraintRegime::LongShort: suffix = "ls"; break;
            case ConstraintRegime::Unconstrained: suffix = "un"; break;
        }
        const auto pct = std::to_string(static_cast<int>(std::lround(level * 100.0)));
        switch (kind) {
            case Kind::Ew: return "ew_" + suffix;
            case Kind::Mvo: return "mvo_" + suffix;
            case Kind::Rpo: return "rpo_" + suffix;
            case Kind::BumvoPercentile: return "bumvo_" + suffix + "_" + pct;
            case Kind::BumvoWorstcase: return "bumvo_wc_" + suffix + "_" + pct;
        }
        return "ew_" + suffix;
    }

    /// Accepts ew | mvo | rpo | bumvo_<pct> | bumvo_wc_<pct>.
    static MethodSpec parse(const std::string& s) {
        if (s == "ew") return {Kind::Ew, 0.0};
        if (s == "mvo") return {Kind::Mvo, 0.0};
        if (s == "rpo") return {Kind::Rpo, 0.0};
        auto parse_level = [&](const std::string& body) {
            const int pct = std::stoi(body);
            if (pct < 1 || pct > 99)
                throw std::invalid_argument("method percentile out of range in: " + s);
            return static_cast<double>(pct) / 100.0;
        };
        if (s.rfind("bumvo_wc_", 0) == 0)
            return {Kind::BumvoWorstcase, parse_level(s.substr(9))};
        if (s.rfind("bumvo_", 0) == 0) return {Kind::BumvoPercentile, parse_level(s.substr(6))};
        throw std::invalid_argument("unknown method: " + s);
    }
};

inline std::vector<MethodSpec> default_portfolio_methods() {
    return {MethodSpec{MethodSpec::Kind::Ew, 0.0},
            MethodSpec{MethodSpec::Kind::Mvo, 0.0},
            MethodSpec{MethodSpec::Kind::Rpo, 0.0},
            MethodSpec{MethodSpec::Kind::BumvoPercentile, 0.95},
            MethodSpec{MethodSpec::Kind::BumvoPercentile, 0.75},
            MethodSpec{MethodSpec::Kind::BumvoPercentile, 0.25}};
}

/// Recursive expanding-window experiment configuration. At each step t the
/// optimizers see rows [0, t] only and the chosen weights earn the return of
/// row t+1; estimates therefore never touch the period they are paid on.
struct PortfolioExperimentConfig {
    std::vector<MethodSpec> methods = default_portfolio_methods();
    ConstraintSet constraints;
    std::size_t warmup = 252;
    BootstrapSpec bootstrap;  ///< block_length 0 resolves to ceil(T^(1/3)) per step
    double lambda = 1.0;
    double rpo_alpha = 0.05;  ///< chi-squared tail used to calibrate kappa2
    double kappa2 = -1.0;     ///< explicit squared radius; negative = calibrate
    GradientAscentConfig ascent;
    double tc = 0.0;  ///< proportional cost per unit turnover (0 by default)
    int periods_per_year = 252;
    unsigned jobs = 1;
    double psd_floor = 1e-10;
};

struct MethodRun {
    MethodSpec method;
    std::string label;
    Eigen::MatrixXd weights;  ///< one row per panel row; zero before warmup
    PnlSeries pnl;            ///< active (post-warmup) window
    MetricReport report;
    std::vector<std::string> warnings;
};

struct PortfolioExperimentResult {
    std::vector<MethodRun> runs;
    std::size_t warmup = 0;
};

inline PortfolioExperimentResult run_portfolio_experiment(const ReturnPanel& r,
                                                          const PortfolioExperimentConfig& cfg) {
    const std::size_t T = r.rows();
    const auto d = static_cast<Eigen::Index>(r.cols());
    if (cfg.methods.empty())
        throw std::invalid_argument("run_portfolio_experiment: no methods configured");
    if (cfg.warmup < 2) throw std::invalid_argument("run_portfolio_experiment: warmup must be >= 2");
    if (T < cfg.warmup + 2)
        throw std::invalid_argument("run_portfolio_experiment: panel shorter than warmup + 2");

    bool need_ensemble = false;
    bool need_omega = false;
    for (const auto& m : cfg.methods) {
        need_ensemble |= m.kind == MethodSpec::Kind::BumvoPercentile ||
                         m.kind == MethodSpec::Kind::BumvoWorstcase;
        need_omega |= m.kind == MethodSpec::Kind::Rpo;
    }
    const double kappa2 =
        cfg.kappa2 >= 0.0 ? cfg.kappa2 : rpo_kappa(static_cast<int>(d), cfg.rpo_alpha);

    PortfolioExperimentResult out;
    out.warmup = cfg.warmup;
    out.runs.resize(cfg.methods.size());
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        out.runs[m].method = cfg.methods[m];
        out.runs[m].label = cfg.methods[m].label(cfg.constraints.regime);
        out.runs[m].weights =
            Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(T), d);
    }

    const Weights ew = equal_weight_start(d, cfg.constraints);

    for (std::size_t t = cfg.warmup; t + 1 < T; ++t) {
        ReturnPanel prefix;
        prefix.assets = r.assets;
        prefix.dates.assign(r.dates.begin(), r.dates.begin() + static_cast<std::ptrdiff_t>(t + 1));
        prefix.values = r.values.topRows(static_cast<Eigen::Index>(t + 1));

        const MomentEstimate moments = psd_repair(sample_moments(prefix), cfg.psd_floor);
        EstimationCovariance omega;
        if (need_omega) omega = estimation_covariance(prefix);

        ReplicateEnsemble ensemble;
        if (need_ensemble) {
            BootstrapSpec spec = cfg.bootstrap;
            if (spec.block_length == 0) spec.block_length = default_block_length(t + 1);
            ensemble = ensemble_moments(prefix, spec, cfg.jobs);
            parallel_for(ensemble.size(), cfg.jobs, [&](std::size_t i) {
                ensemble.estimates[i] = psd_repair(ensemble.estimates[i], cfg.psd_floor);
            });
        }

        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            auto& run = out.runs[m];
            const auto ti = static_cast<Eigen::Index>(t);
            try {
                Weights w;
                switch (cfg.methods[m].kind) {
                    case MethodSpec::Kind::Ew:
                        w = ew;
                        break;
                    case MethodSpec::Kind::Mvo:
                        w = mvo_plugin(moments, cfg.lambda, cfg.constraints, cfg.ascent).weights;
                        break;
                    case MethodSpec::Kind::Rpo:
                        w = rpo(moments, omega, kappa2, cfg.lambda, cfg.constraints, cfg.ascent)
                                .weights;
                        break;
                    case MethodSpec::Kind::BumvoPercentile: {
                        RobustnessParams params;
                        params.lambda = cfg.lambda;
                        params.alpha = cfg.methods[m].level;
                        w = bumvo_percentile(ensemble, params, cfg.constraints, cfg.ascent).weights;
                        break;
                    }
                    case MethodSpec::Kind::BumvoWorstcase:
                        w = bumvo_worstcase(ensemble, cfg.methods[m].level, cfg.lambda,
                                            cfg.constraints, cfg.ascent)
                                .weights;
                        break;
                }
                run.weights.row(ti) = w.theta.transpose();
            } catch (const std::exception& e) {
                run.warnings.push_back("step " + std::to_string(t) + ": " + e.what() +
                                       " (carrying previous weights)");
                run.weights.row(ti) = t > cfg.warmup
                                          ? run.weights.row(ti - 1)
                                          : Eigen::RowVectorXd::Zero(d).eval();
            }
        }
    }

    // the final row never earns; hold the last chosen weights so no phantom
    // exit trade is charged
    for (auto& run : out.runs)
        run.weights.row(static_cast<Eigen::Index>(T - 1)) =
            run.weights.row(static_cast<Eigen::Index>(T - 2));

    // backtest on the active window only
    const CostModel cost = CostModel::proportional(d, cfg.tc);
    for (auto& run : out.runs) {
        ReturnPanel active;
        active.assets = r.assets;
        active.dates.assign(r.dates.begin() + static_cast<std::ptrdiff_t>(cfg.warmup),
                            r.dates.end());
        active.values = r.values.bottomRows(static_cast<Eigen::Index>(T - cfg.warmup));
        PositionSeries positions;
        positions.weights = run.weights.bottomRows(static_cast<Eigen::Index>(T - cfg.warmup));
        run.pnl = backtest_pnl(active, positions, cost);
        run.report = metrics(run.pnl, cfg.periods_per_year);
    }
    return out;
}

// --- hyperparameter tuning experiment ----------------------------------------

inline std::vector<SelectionRule> default_tuning_rules() {
    std::vector<SelectionRule> rules;
    for (int pct = 10; pct <= 90; pct += 10)
        rules.push_back({SelectionRule::Kind::NpbPercentile, static_cast<double>(pct) / 100.0});
    rules.push_back({SelectionRule::Kind::Erm, 0.0});
    rules.push_back({SelectionRule::Kind::Cb1, 0.0});
    rules.push_back({SelectionRule::Kind::Cb2, 0.0});
    return rules;
}

/// Per-asset trend-following tuning configuration: split each asset's
/// history, select the lookback on the training segment under every rule,
/// then measure train/test metrics and their gap.
struct TuningExperimentConfig {
    std::vector<std::size_t> grid = {21, 42, 63, 126, 189, 252};
    double forecast_scale = 1.0;
    SplitSpec split{0.8};
    std::vector<SelectionRule> rules = default_tuning_rules();
    StrategyUtility utility = StrategyUtility::Sharpe;
    BootstrapSpec bootstrap;  ///< block_length 0 resolves to ceil(T^(1/3))
    double tc = 0.0005;       ///< 5 bp per unit turnover
    bool charge_initial_entry = true;
    int periods_per_year = 252;
    double ci_level = 0.95;
    /// Selects the literal two-stage reading of the percentile rule
    /// (mean per candidate, then the percentile across candidates) instead
    /// of the per-candidate percentile. Off by default.
    bool literal_algorithm_reading = false;
    unsigned jobs = 1;
};

struct AssetTuningRow {
    std::string asset;
    std::string rule;
    TsmomParams selected;
    GapReport report;
};

struct TuningCiRow {
    std::string rule;
    GaussianCi train, test, gap;
    std::size_t assets_used = 0;
};

struct TuningExperimentResult {
    std::vector<AssetTuningRow> rows;  ///< asset-major, rules in config order
    std::vector<std::pair<std::string, std::string>> skipped;  ///< asset, reason
    std::vector<TuningCiRow> ci;  ///< cross-asset CI per rule for the chosen utility metric
};

namespace detail {

/// Literal two-stage percentile selection: mean utility per candidate, then
/// the candidate at the type-1 percentile rank across candidates.
inline TsmomParams select_theta_literal(const std::vector<TsmomParams>& grid,
                                        const std::vector<std::vector<double>>& lists,
                                        double alpha) {
    std::vector<std::pair<double, TsmomParams>> means;
    means.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        for (const double v : lists[g]) sum += v;
        means.emplace_back(sum / static_cast<double>(lists[g].size()), grid[g]);
    }
    std::stable_sort(means.begin(), means.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return b.second < a.second;  // equal means: larger lookback sorts first
    });
    return means[type1_rank(means.size(), alpha) - 1].second;
}

inline double utility_metric(const MetricReport& m, StrategyUtility kind, bool& defined) {
    if (kind == StrategyUtility::Sharpe) {
        defined = m.sharpe.has_value();
        return defined ? *m.sharpe : 0.0;
    }
    defined = true;
    return m.max_dd;
}

}  // namespace detail

inline TuningExperimentResult run_tuning_experiment(const ReturnPanel& r,
                                                    const TuningExperimentConfig& cfg) {
    if (cfg.grid.empty()) throw std::invalid_argument("run_tuning_experiment: empty grid");
    if (cfg.rules.empty()) throw std::invalid_argument("run_tuning_experiment: no rules");
    const std::size_t d = r.cols();
    const std::size_t max_lookback = *std::max_element(cfg.grid.begin(), cfg.grid.end());

    std::vector<TsmomParams> grid;
    grid.reserve(cfg.grid.size());
    for (const auto lb : cfg.grid) grid.push_back(TsmomParams{lb, cfg.forecast_scale});
    std::sort(grid.begin(), grid.end());

    struct AssetOutcome {
        bool skipped = false;
        std::string reason;
        std::vector<AssetTuningRow> rows;
    };
    std::vector<AssetOutcome> outcomes(d);

    // Parallelism goes across assets here; replicate loops below run serially
    // so the thread budget is not oversubscribed.
    parallel_for(d, cfg.jobs, [&](std::size_t a) {
        AssetOutcome& outcome = outcomes[a];
        const ReturnPanel asset = r.column(a);
        ReturnPanel train, test;
        try {
            std::tie(train, test) = split(asset, cfg.split);
        } catch (const std::exception& e) {
            outcome.skipped = true;
            outcome.reason = e.what();
            return;
        }
        if (train.rows() <= max_lookback + 2) {
            outcome.skipped = true;
            outcome.reason = "train segment shorter than max lookback + 2";
            return;
        }
        if (test.rows() < 2) {
            outcome.skipped = true;
            outcome.reason = "test segment shorter than 2 rows";
            return;
        }

        BootstrapSpec spec = cfg.bootstrap;
        spec.seed = derive_seed(cfg.bootstrap.seed, a);
        if (spec.block_length == 0) spec.block_length = default_block_length(train.rows());
        const CostModel cost{Eigen::VectorXd::Constant(1, cfg.tc), cfg.charge_initial_entry};

        const StrategyUtilityTable table = bootstrap_strategy_utilities(
            train, grid, spec, cost, cfg.utility, 1, cfg.periods_per_year);

        // replicate utilities of the realized (in-sample) strategy returns,
        // resampled on the common evaluation window; paths are shared across
        // candidates
        std::vector<std::vector<double>> cb2_lists(table.grid.size());
        {
            std::vector<std::vector<double>> realized(table.grid.size());
            for (std::size_t g = 0; g < table.grid.size(); ++g) {
                const PnlSeries pnl =
                    backtest_pnl(train, tsmom_positions(train, table.grid[g]), cost);
                realized[g].assign(pnl.values.begin() + static_cast<std::ptrdiff_t>(table.eval_start),
                                   pnl.values.end());
            }
            const std::size_t n_eval = realized.front().size();
            BootstrapSpec cb2_spec = spec;
            cb2_spec.seed = derive_seed(spec.seed, 0xCB2);
            cb2_spec.block_length = std::min(cb2_spec.block_length, n_eval);
            for (std::size_t g = 0; g < table.grid.size(); ++g)
                cb2_lists[g].resize(cb2_spec.count);
            for (std::size_t i = 0; i < cb2_spec.count; ++i) {
                const IndexPath path = generate_indices(cb2_spec, n_eval, i);
                std::vector<double> resampled(n_eval);
                for (std::size_t g = 0; g < table.grid.size(); ++g) {
                    for (std::size_t k = 0; k < n_eval; ++k)
                        resampled[k] = realized[g][path.indices[k]];
                    cb2_lists[g][i] = detail::pnl_utility(resampled, 0, cfg.utility,
                                                          cfg.periods_per_year);
                }
            }
        }

        auto zip = [&](const std::vector<std::vector<double>>& lists) {
            std::vector<std::pair<TsmomParams, std::vector<double>>> zipped;
            zipped.reserve(table.grid.size());
            for (std::size_t g = 0; g < table.grid.size(); ++g)
                zipped.emplace_back(table.grid[g], lists[g]);
            return zipped;
        };
        std::vector<std::vector<double>> erm_lists(table.grid.size());
        for (std::size_t g = 0; g < table.grid.size(); ++g)
            erm_lists[g] = {table.insample[g]};

        for (const auto& rule : cfg.rules) {
            TsmomParams selected;
            switch (rule.kind) {
                case SelectionRule::Kind::Erm:
                    selected = select_theta(zip(erm_lists), rule);
                    break;
                case SelectionRule::Kind::Cb1:
                    selected = select_theta(zip(table.bootstrap_utilities), rule);
                    break;
                case SelectionRule::Kind::Cb2:
                    selected = select_theta(zip(cb2_lists), rule);
                    break;
                case SelectionRule::Kind::NpbPercentile:
                    selected = cfg.literal_algorithm_reading
                                   ? detail::select_theta_literal(table.grid,
                                                                  table.bootstrap_utilities,
                                                                  rule.alpha)
                                   : select_theta(zip(table.bootstrap_utilities), rule);
                    break;
            }

            // Positions for the evaluation run over the full history, so the
            // test segment is entered holding whatever the end of training
            // implied (as a deployed strategy would). PnL index t earns the
            // return of row t+1: train metrics cover earning rows
            // [max_lookback, n_train), test metrics the whole test segment.
            const PnlSeries full_pnl =
                backtest_pnl(asset, tsmom_positions(asset, selected), cost);
            const std::size_t n_train = train.rows();
            auto window_metrics = [&](std::size_t begin, std::size_t end) {
                std::vector<std::string> dates(
                    full_pnl.dates.begin() + static_cast<std::ptrdiff_t>(begin),
                    full_pnl.dates.begin() + static_cast<std::ptrdiff_t>(end));
                std::vector<double> values(
                    full_pnl.values.begin() + static_cast<std::ptrdiff_t>(begin),
                    full_pnl.values.begin() + static_cast<std::ptrdiff_t>(end));
                return metrics(PnlSeries::from_returns(std::move(dates), std::move(values)),
                               cfg.periods_per_year);
            };
            const MetricReport train_report = window_metrics(table.eval_start, n_train - 1);
            const MetricReport test_report = window_metrics(n_train - 1, full_pnl.size());
            outcome.rows.push_back(AssetTuningRow{r.assets[a], rule.name(), selected,
                                                  gap(train_report, test_report)});
        }
    });

    TuningExperimentResult result;
    for (std::size_t a = 0; a < d; ++a) {
        if (outcomes[a].skipped)
            result.skipped.emplace_back(r.assets[a], outcomes[a].reason);
        else
            result.rows.insert(result.rows.end(), outcomes[a].rows.begin(),
                               outcomes[a].rows.end());
    }

    for (const auto& rule : cfg.rules) {
        TuningCiRow ci_row;
        ci_row.rule = rule.name();
        std::vector<double> train_vals, test_vals, gap_vals;
        for (const auto& row : result.rows) {
            if (row.rule != ci_row.rule) continue;
            bool train_ok = false, test_ok = false;
            const double tr = detail::utility_metric(row.report.train, cfg.utility, train_ok);
            const double te = detail::utility_metric(row.report.test, cfg.utility, test_ok);
            if (!train_ok || !test_ok) continue;  // sentinel metric: excluded from the CI
            train_vals.push_back(tr);
            test_vals.push_back(te);
            gap_vals.push_back(te - tr);
        }
        ci_row.assets_used = train_vals.size();
        if (train_vals.size() >= 2) {
            ci_row.train = gaussian_ci(train_vals, cfg.ci_level);
            ci_row.test = gaussian_ci(test_vals, cfg.ci_level);
            ci_row.gap = gaussian_ci(gap_vals, cfg.ci_level);
        } else {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            ci_row.train = ci_row.test = ci_row.gap = GaussianCi{nan, nan, nan};
            if (train_vals.size() == 1) {
                ci_row.train.mean = train_vals.front();
                ci_row.test.mean = test_vals.front();
                ci_row.gap.mean = gap_vals.front();
            }
        }
        result.ci.push_back(std::move(ci_row));
    }
    return result;
}

}  // namespace bootrobopt
