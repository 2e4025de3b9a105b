// Acceptance suite: end-to-end checks of the numerical contracts and the CLI
// surface, one printed PASS/FAIL line per criterion. Returns the number of
// failed criteria as the exit code.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bootrobopt/estimate.hpp"
#include "bootrobopt/evaluate.hpp"
#include "bootrobopt/harness.hpp"
#include "bootrobopt/optimize.hpp"
#include "bootrobopt/resample.hpp"
#include "bootrobopt/strategy.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace bootrobopt;
using Clock = std::chrono::steady_clock;

namespace {

void check(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    check(static_cast<bool>(in), "missing file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

// --- shared fixtures ---------------------------------------------------------

ReplicateEnsemble bootstrap_ensemble(std::size_t S, std::size_t d, std::uint64_t seed) {
    auto synth = SyntheticSpec::uniform(60, d, 0.02, 0.08);
    synth.cross_correlation = 0.2;
    synth.seed = seed;
    const auto panel = generate_synthetic(synth);
    BootstrapSpec spec{BootstrapMethod::Stationary, 5, S, seed + 1};
    auto e = ensemble_moments(panel, spec);
    for (auto& est : e.estimates) est = psd_repair(est);
    return e;
}

double percentile_objective(const ReplicateEnsemble& e, const Eigen::VectorXd& theta,
                            double lambda, double alpha) {
    std::vector<double> u(e.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        u[i] = theta.dot(e.estimates[i].mu) -
               0.5 * lambda * theta.dot(e.estimates[i].sigma * theta);
    return percentile(u, alpha);
}

const GradientAscentConfig kSmooth{0.05, 1.0, 1e-15, 300000};
const GradientAscentConfig kAnneal{0.2, 0.9997, 0.0, 80000};

// --- criteria ----------------------------------------------------------------

void criterion_closed_form(std::ostream& log) {
    const auto start = Clock::now();
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const ConstraintSet un{ConstraintRegime::Unconstrained, 1.0, 1.0};
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 8);
        Eigen::MatrixXd a(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) a(i, j) = u(rng);
        MomentEstimate m;
        m.sigma = a * a.transpose() + 0.05 * Eigen::MatrixXd::Identity(d, d);
        m.mu.resize(d);
        for (Eigen::Index i = 0; i < d; ++i) m.mu(i) = u(rng);
        const double lambda = 0.5 + static_cast<double>(rng() % 100) / 50.0;
        const auto res = mvo_plugin(m, lambda, un);
        const Eigen::VectorXd reference = m.sigma.fullPivLu().solve(m.mu) / lambda;
        const double rel = (res.weights.theta - reference).norm() / (1.0 + reference.norm());
        check(rel <= 1e-8, "instance " + std::to_string(trial) + " deviates by " +
                               std::to_string(rel));
    }
    const double elapsed = seconds_since(start);
    check(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s exceeds 5s");
    log << "100 instances, max d=8, " << elapsed << "s";
}

void criterion_percentile_machinery(std::ostream& log) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        std::vector<double> values(n);
        for (auto& v : values) v = u(rng);
        const double alpha = 0.01 + 0.98 * static_cast<double>(rng() % 997) / 997.0;
        check(percentile(values, alpha) == oracle::sort_percentile(values, alpha),
              "percentile mismatch vs sort oracle");
    }

    std::uniform_real_distribution<double> point(-1.0, 1.0);
    const double h = 1e-6;
    int total_points = 0;
    for (int instance = 0; instance < 10; ++instance) {
        const auto e = bootstrap_ensemble(12, 3, 5000 + instance);
        auto f = [&](const Eigen::VectorXd& t) { return percentile_objective(e, t, 1.0, 0.25); };
        int accepted = 0, guard = 0;
        while (accepted < 100 && guard < 20000) {
            ++guard;
            Eigen::VectorXd theta(3);
            for (int i = 0; i < 3; ++i) theta(i) = point(rng);
            std::vector<double> utilities(e.size());
            for (std::size_t i = 0; i < e.size(); ++i)
                utilities[i] = theta.dot(e.estimates[i].mu) -
                               0.5 * theta.dot(e.estimates[i].sigma * theta);
            const double pct = percentile(utilities, 0.25);
            double gap = 1e9;
            for (const double v : utilities)
                if (v != pct) gap = std::min(gap, std::abs(v - pct));
            if (gap < 1e-4) continue;  // tied point: the subgradient is set-valued there
            ++accepted;
            ++total_points;
            const auto g = percentile_subgradient(Weights{theta}, e, 1.0, 0.25);
            const auto fd = oracle::central_diff(f, theta, h);
            const double rel = (fd - g).norm() / std::max(1e-8, g.norm());
            check(rel <= 1e-4, "finite-difference deviation " + std::to_string(rel));
        }
        check(accepted == 100, "could not find 100 untied points");
    }
    log << "1000 sort-oracle lists, " << total_points << " finite-difference points";
}

void criterion_grid_parity(std::ostream& log) {
    const auto start = Clock::now();
    const ConstraintSet lo{ConstraintRegime::LongOnly, 1.0, 1.0};
    for (const std::size_t S : {3u, 5u}) {
        const auto e = bootstrap_ensemble(S, 2, 777 + S);

        const auto wc = bumvo_worstcase(e, 0.75, 1.0, lo, kAnneal);
        const auto region = quantile_box(e, 0.75);
        std::vector<std::size_t> feasible;
        for (std::size_t i = 0; i < e.size(); ++i)
            if (in_region(e.estimates[i], region)) feasible.push_back(i);
        if (feasible.empty())
            for (std::size_t i = 0; i < e.size(); ++i) feasible.push_back(i);
        const double wc_grid = oracle::simplex_grid_max(2, 1e-3, [&](const Eigen::VectorXd& t) {
            double worst = 1e300;
            for (const auto i : feasible) {
                const auto& m = e.estimates[i];
                worst = std::min(worst, t.dot(m.mu) - 0.5 * t.dot(m.sigma * t));
            }
            return worst;
        });
        check(std::abs(wc.objective - wc_grid) < 1e-3,
              "worst-case S=" + std::to_string(S) + ": |" + std::to_string(wc.objective) + " - " +
                  std::to_string(wc_grid) + "| >= 1e-3");

        RobustnessParams params;
        params.alpha = 0.25;
        const auto pc = bumvo_percentile(e, params, lo, kAnneal);
        const double pc_grid = oracle::simplex_grid_max(2, 1e-3, [&](const Eigen::VectorXd& t) {
            return percentile_objective(e, t, params.lambda, params.alpha);
        });
        check(std::abs(pc.objective - pc_grid) < 1e-3,
              "percentile S=" + std::to_string(S) + ": |" + std::to_string(pc.objective) + " - " +
                  std::to_string(pc_grid) + "| >= 1e-3");
    }
    const double elapsed = seconds_since(start);
    check(elapsed < 120.0, "runtime exceeds 2 minutes");
    log << "worst-case and percentile vs 1e-3 simplex grids, " << elapsed << "s";
}

void criterion_reductions(std::ostream& log) {
    const ConstraintSet lo{ConstraintRegime::LongOnly, 1.0, 1.0};
    const auto m = bootstrap_ensemble(1, 3, 31).estimates[0];

    // kappa2 = 0: the ellipsoidal robust counterpart is plain MVO
    const EstimationCovariance omega{m.sigma / 60.0};
    const auto robust = rpo(m, omega, 0.0, 1.0, lo, kSmooth);
    const auto plain = mvo_plugin(m, 1.0, lo, kSmooth);
    check((robust.weights.theta - plain.weights.theta).norm() < 1e-6, "rpo(kappa2=0) != mvo");

    // S = 1: the percentile objective is that replicate's utility
    ReplicateEnsemble single;
    single.estimates.push_back(m);
    RobustnessParams params;
    params.alpha = 0.25;
    const auto pc = bumvo_percentile(single, params, lo, kSmooth);
    check((pc.weights.theta - plain.weights.theta).norm() < 1e-6,
          "bumvo_percentile(S=1) != mvo");

    // identical replicates: every robust variant collapses to plain MVO
    ReplicateEnsemble cloned;
    for (int i = 0; i < 9; ++i) cloned.estimates.push_back(m);
    const auto pc9 = bumvo_percentile(cloned, params, lo, kSmooth);
    check((pc9.weights.theta - plain.weights.theta).norm() < 1e-6,
          "bumvo_percentile(identical) != mvo");
    const auto wc9 = bumvo_worstcase(cloned, 0.75, 1.0, lo, kSmooth);
    check((wc9.weights.theta - plain.weights.theta).norm() < 1e-6,
          "bumvo_worstcase(identical) != mvo");
    const auto ch9 = bumvo_chance(cloned, params, -1e9, lo, kSmooth);
    check(ch9.feasible, "bumvo_chance(identical, slack floor) infeasible");
    check((ch9.result.weights.theta - plain.weights.theta).norm() < 1e-6,
          "bumvo_chance(identical) != mvo");
    log << "rpo/percentile/worst-case/chance reductions within 1e-6";
}

void criterion_chi_squared(std::ostream& log) {
    check(std::abs(rpo_kappa(2, 0.05) - 5.99146) < 1e-4, "rpo_kappa(2, 0.05) != 5.99146");
    struct Pair {
        int d;
        double alpha;
    };
    const Pair pairs[] = {{1, 0.3173}, {3, 0.10}, {5, 0.05}, {7, 0.50}, {10, 0.01}, {2, 0.05}};
    for (const auto& p : pairs) {
        const double got = rpo_kappa(p.d, p.alpha);
        const double ref = oracle::chi2_quantile_bisect(1.0 - p.alpha, p.d);
        check(std::abs(got - ref) < 1e-4,
              "d=" + std::to_string(p.d) + " alpha=" + std::to_string(p.alpha) + ": " +
                  std::to_string(got) + " vs oracle " + std::to_string(ref));
    }
    log << "6 (d, alpha) pairs vs quadrature bisection oracle";
}

void criterion_bootstrap_fidelity(std::ostream& log) {
    const auto start = Clock::now();
    auto synth = SyntheticSpec::uniform(4000, 1, 0.0, 0.01);
    synth.ar1 = 0.8;
    synth.seed = 99;
    const auto panel = generate_synthetic(synth);

    auto lag1 = [](const Eigen::VectorXd& x) {
        const double mean = x.mean();
        double num = 0.0, den = 0.0;
        for (Eigen::Index t = 0; t < x.size(); ++t) {
            den += (x(t) - mean) * (x(t) - mean);
            if (t + 1 < x.size()) num += (x(t) - mean) * (x(t + 1) - mean);
        }
        return num / den;
    };
    const double source_rho = lag1(panel.values.col(0));
    const double source_mean = panel.values.col(0).mean();

    BootstrapSpec spec{BootstrapMethod::Stationary, 50, 200, 7};
    double mean_rho = 0.0;
    std::vector<double> means(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        const auto replicate = materialize(panel, generate_indices(spec, panel.rows(), i));
        mean_rho += lag1(replicate.values.col(0));
        means[i] = replicate.values.col(0).mean();
    }
    mean_rho /= static_cast<double>(spec.count);
    check(std::abs(mean_rho - source_rho) < 0.08,
          "lag-1 autocorrelation drift " + std::to_string(mean_rho - source_rho));

    double avg = 0.0;
    for (const double v : means) avg += v;
    avg /= static_cast<double>(means.size());
    double ss = 0.0;
    for (const double v : means) ss += (v - avg) * (v - avg);
    const double se = std::sqrt(ss / static_cast<double>(means.size() - 1)) /
                      std::sqrt(static_cast<double>(means.size()));
    check(std::abs(avg - source_mean) < 3.0 * se, "replicate mean bias beyond 3 SE");

    const double elapsed = seconds_since(start);
    check(elapsed < 30.0, "runtime exceeds 30s");
    log << "rho_source=" << source_rho << " rho_bootstrap=" << mean_rho << ", " << elapsed << "s";
}

void criterion_backtest_correctness(std::ostream& log) {
    // buy-and-hold reproduction
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    ReturnPanel r;
    r.assets = {"A"};
    r.values.resize(100, 1);
    for (int t = 0; t < 100; ++t) {
        r.dates.push_back(synthetic_date(static_cast<std::size_t>(t)));
        r.values(t, 0) = u(rng);
    }
    PositionSeries always_long;
    always_long.weights = Eigen::MatrixXd::Ones(100, 1);
    const auto pnl = backtest_pnl(r, always_long, CostModel::zero(1));
    double wealth = 1.0;
    for (std::size_t t = 0; t + 1 < 100; ++t) {
        wealth *= 1.0 + r.values(static_cast<Eigen::Index>(t + 1), 0);
        check(std::abs(pnl.wealth[t + 1] - wealth) <= 1e-12 * std::abs(wealth),
              "buy-and-hold wealth drift at t=" + std::to_string(t));
    }

    // one sign flip, costs booked exactly
    ReturnPanel flip;
    flip.assets = {"A"};
    flip.dates = {"2020-01-01", "2020-01-02", "2020-01-03", "2020-01-04"};
    flip.values.resize(4, 1);
    flip.values << 0.0, 0.01, 0.01, 0.01;
    PositionSeries pos;
    pos.weights.resize(4, 1);
    pos.weights << 1, 1, -1, -1;
    CostModel cost = CostModel::proportional(1, 0.001);
    cost.charge_initial_entry = false;
    const auto flipped = backtest_pnl(flip, pos, cost);
    check(flipped.values[0] == 0.01, "pre-flip period altered");
    check(flipped.values[1] == 0.01 - 0.001 * 2.0, "flip debit is not exactly 2*tc");
    check(flipped.values[2] == -0.01, "post-flip period altered");

    // look-ahead mutation on the portfolio experiment
    auto synth = SyntheticSpec::uniform(60, 2, 0.0005, 0.01);
    synth.seed = 5;
    const auto panel = generate_synthetic(synth);
    PortfolioExperimentConfig pcfg;
    pcfg.warmup = 30;
    pcfg.bootstrap = BootstrapSpec{BootstrapMethod::Stationary, 4, 12, 3};
    pcfg.ascent = GradientAscentConfig{0.05, 0.999, 1e-9, 300};
    const auto base = run_portfolio_experiment(panel, pcfg);
    auto mutated = panel;
    mutated.values(45, 0) = 0.75;
    const auto shocked = run_portfolio_experiment(mutated, pcfg);
    for (std::size_t m = 0; m < base.runs.size(); ++m)
        for (std::size_t t = pcfg.warmup; t < 45; ++t)
            check(base.runs[m].weights.row(static_cast<Eigen::Index>(t)) ==
                      shocked.runs[m].weights.row(static_cast<Eigen::Index>(t)),
                  "portfolio weights at t<45 changed by a future return");

    // look-ahead mutation on the tuning experiment
    auto tsynth = SyntheticSpec::uniform(300, 1, 0.001, 0.012);
    tsynth.ar1 = 0.2;
    tsynth.seed = 6;
    const auto tpanel = generate_synthetic(tsynth);
    TuningExperimentConfig tcfg;
    tcfg.grid = {5, 10, 21};
    tcfg.bootstrap = BootstrapSpec{BootstrapMethod::Stationary, 5, 32, 9};
    const auto tbase = run_tuning_experiment(tpanel, tcfg);
    auto tmutated = tpanel;
    tmutated.values(290, 0) = 0.4;  // deep in the test segment
    const auto tshocked = run_tuning_experiment(tmutated, tcfg);
    check(tbase.rows.size() == tshocked.rows.size(), "tuning row count changed");
    for (std::size_t i = 0; i < tbase.rows.size(); ++i) {
        check(tbase.rows[i].selected.lookback == tshocked.rows[i].selected.lookback,
              "tuning selection changed by a test-segment return");
        check(tbase.rows[i].report.train.expected_return ==
                  tshocked.rows[i].report.train.expected_return,
              "tuning train metrics changed by a test-segment return");
    }
    log << "buy-and-hold 1e-12, exact flip debit, look-ahead mutations clean";
}

void criterion_regime_shift(std::ostream& log) {
    const auto start = Clock::now();
    const int runs = 20;
    int npb_wins = 0;
    double npb_total = 0.0, erm_total = 0.0;
    for (int run = 0; run < runs; ++run) {
        auto synth = SyntheticSpec::uniform(2000, 10, 0.0012, 0.011);
        synth.ar1 = 0.1;
        synth.cross_correlation = 0.15;
        synth.shift_fraction = 0.8;
        synth.shift_multiplier = -1.0;
        synth.seed = 31000 + static_cast<std::uint64_t>(run);
        const auto panel = generate_synthetic(synth);

        TuningExperimentConfig cfg;
        cfg.grid = {21, 42, 63, 126, 189, 252};
        cfg.bootstrap = BootstrapSpec{BootstrapMethod::Stationary, 0, 100,
                                      91000 + static_cast<std::uint64_t>(run)};
        cfg.rules = {SelectionRule{SelectionRule::Kind::NpbPercentile, 0.4},
                     SelectionRule{SelectionRule::Kind::NpbPercentile, 0.5},
                     SelectionRule{SelectionRule::Kind::NpbPercentile, 0.6},
                     SelectionRule{SelectionRule::Kind::NpbPercentile, 0.7},
                     SelectionRule{SelectionRule::Kind::Erm, 0.0}};
        cfg.jobs = 1;
        const auto result = run_tuning_experiment(panel, cfg);
        check(result.skipped.empty(), "assets skipped in regime-shift run");

        double npb_gap = 0.0, erm_gap = 0.0;
        int npb_count = 0, erm_count = 0;
        for (const auto& row : result.rows) {
            if (!row.report.gap.sharpe) continue;
            const double g = std::abs(*row.report.gap.sharpe);
            if (row.rule == "erm") {
                erm_gap += g;
                ++erm_count;
            } else {
                npb_gap += g;
                ++npb_count;
            }
        }
        check(erm_count > 0 && npb_count > 0, "missing Sharpe gaps");
        const double npb_mean = npb_gap / npb_count;
        const double erm_mean = erm_gap / erm_count;
        npb_total += npb_mean;
        erm_total += erm_mean;
        if (npb_mean < erm_mean) ++npb_wins;
    }
    const double elapsed = seconds_since(start);
    check(npb_total / runs < erm_total / runs,
          "mean |Sharpe gap|: NPB " + std::to_string(npb_total / runs) + " !< ERM " +
              std::to_string(erm_total / runs));
    check(npb_wins * 10 >= runs * 7, "NPB wins only " + std::to_string(npb_wins) + "/20 runs");
    check(elapsed < 600.0, "runtime exceeds 10 minutes");
    log << "NPB mean |gap| " << npb_total / runs << " < ERM " << erm_total / runs << ", wins "
        << npb_wins << "/20, " << elapsed << "s";
}

// --- CLI-level criteria --------------------------------------------------

std::string cli_binary() {
    const char* env = std::getenv("BOOTROBOPT_BIN");
    check(env != nullptr, "BOOTROBOPT_BIN is not set (run through ctest)");
    check(fs::exists(env), std::string("CLI binary not found at ") + env);
    return env;
}

int run_cli(const std::string& args, const fs::path& log_path) {
    const std::string command = cli_binary() + " " + args + " >> " + log_path.string() + " 2>&1";
    const int status = std::system(command.c_str());
    return status < 0 ? status : WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "bootrobopt_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            files[fs::relative(entry.path(), dir).string()] = read_file(entry.path());
    return files;
}

void criterion_structural_outputs(std::ostream& log) {
    const fs::path work = fresh_dir("structural");
    const fs::path logfile = work / "cli.log";

    const std::string pf_args =
        "portfolio --out " + (work / "results").string() +
        " --seed 7 --warmup 60 --replicates 16 --synth-T 140 --synth-d 4 --run-id structural";
    check(run_cli(pf_args, logfile) == 0, "portfolio run failed (see " + logfile.string() + ")");
    const fs::path pf_dir = work / "results" / "portfolio" / "structural";
    const auto metrics = lines_of(read_file(pf_dir / "metrics.csv"));
    check(metrics.size() == 7, "metrics.csv must have a header and six method rows");
    check(metrics[0] == "method,E[R],Std(R),Sharpe,Sortino,AvgDD,MaxDD",
          "metrics.csv header mismatch: " + metrics[0]);
    const std::vector<std::string> expected_rows{"ew_lo",       "mvo_lo",      "rpo_lo",
                                                 "bumvo_lo_95", "bumvo_lo_75", "bumvo_lo_25"};
    for (std::size_t i = 0; i < expected_rows.size(); ++i) {
        const auto& line = metrics[i + 1];
        check(line.rfind(expected_rows[i] + ",", 0) == 0,
              "row " + std::to_string(i + 1) + " is not " + expected_rows[i] + ": " + line);
        check(std::count(line.begin(), line.end(), ',') == 6,
              "row " + expected_rows[i] + " does not have 6 value columns");
    }
    for (const auto& name : {"config.json", "weights.csv", "metrics_full.csv", "pnl_ew_lo.csv",
                             "pnl_bumvo_lo_25.csv"})
        check(fs::exists(pf_dir / name), std::string("missing output ") + name);

    const std::string tn_args =
        "tune --out " + (work / "results").string() +
        " --seed 9 --replicates 24 --grid 5,10,21 --synth-T 400 --synth-d 3 --run-id structural";
    check(run_cli(tn_args, logfile) == 0, "tune run failed (see " + logfile.string() + ")");
    const fs::path tn_dir = work / "results" / "tune" / "structural";
    const auto ci = lines_of(read_file(tn_dir / "ci.csv"));
    check(ci.size() == 13, "ci.csv must have a header plus 12 rule rows, got " +
                               std::to_string(ci.size()));
    check(ci[0].rfind("rule,metric,train_mean,train_lo,train_hi,test_mean,test_lo,test_hi,"
                      "gap_mean,gap_lo,gap_hi",
                      0) == 0,
          "ci.csv header mismatch");
    const std::vector<std::string> expected_rules{"p10", "p20", "p30", "p40", "p50", "p60",
                                                  "p70", "p80", "p90", "erm", "cb1", "cb2"};
    for (std::size_t i = 0; i < expected_rules.size(); ++i)
        check(ci[i + 1].rfind(expected_rules[i] + ",sharpe,", 0) == 0,
              "ci.csv row " + std::to_string(i + 1) + " is not " + expected_rules[i] + ": " +
                  ci[i + 1]);
    for (const auto& name : {"config.json", "selection.csv", "gaps.csv"})
        check(fs::exists(tn_dir / name), std::string("missing output ") + name);

    log << "metrics.csv table schema and ci.csv rule categories as published";
}

void criterion_determinism(std::ostream& log) {
    const fs::path work = fresh_dir("determinism");
    const fs::path logfile = work / "cli.log";
    const std::string out = (work / "results").string();

    const std::string pf_args = "portfolio --out " + out +
                                " --seed 11 --warmup 50 --replicates 12 --synth-T 110 "
                                "--synth-d 3 --methods ew,mvo,bumvo_75,bumvo_wc_75";
    check(run_cli(pf_args + " --jobs 1", logfile) == 0, "portfolio run failed");
    const fs::path pf_root = work / "results" / "portfolio";
    fs::path pf_dir;
    for (const auto& entry : fs::directory_iterator(pf_root)) pf_dir = entry.path();
    const auto before = snapshot(pf_dir);
    check(before.count("config.json") == 1, "portfolio config.json missing");

    const std::string rerun = "portfolio --config " + (pf_dir / "config.json").string() +
                              " --out " + out + " --jobs 8";
    check(run_cli(rerun, logfile) == 0, "portfolio rerun failed");
    const auto after = snapshot(pf_dir);
    check(before.size() == after.size(), "portfolio rerun changed the file set");
    for (const auto& [name, content] : before)
        check(after.at(name) == content, "portfolio rerun changed " + name);

    const std::string tn_args = "tune --out " + out +
                                " --seed 13 --replicates 16 --grid 5,10 --synth-T 260 --synth-d 2";
    check(run_cli(tn_args + " --jobs 1", logfile) == 0, "tune run failed");
    const fs::path tn_root = work / "results" / "tune";
    fs::path tn_dir;
    for (const auto& entry : fs::directory_iterator(tn_root)) tn_dir = entry.path();
    const auto tn_before = snapshot(tn_dir);
    const std::string tn_rerun = "tune --config " + (tn_dir / "config.json").string() + " --out " +
                                 out + " --jobs 8";
    check(run_cli(tn_rerun, logfile) == 0, "tune rerun failed");
    const auto tn_after = snapshot(tn_dir);
    check(tn_before.size() == tn_after.size(), "tune rerun changed the file set");
    for (const auto& [name, content] : tn_before)
        check(tn_after.at(name) == content, "tune rerun changed " + name);

    log << "rerun from config.json byte-identical at --jobs 8 for both experiments";
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        std::function<void(std::ostream&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, "closed-form MVO parity", criterion_closed_form},
        {2, "percentile machinery", criterion_percentile_machinery},
        {3, "brute-force grid parity", criterion_grid_parity},
        {4, "robust-optimizer reductions", criterion_reductions},
        {5, "chi-squared calibration", criterion_chi_squared},
        {6, "bootstrap fidelity", criterion_bootstrap_fidelity},
        {7, "backtest correctness", criterion_backtest_correctness},
        {8, "regime-shift generalization", criterion_regime_shift},
        {9, "structural output schema", criterion_structural_outputs},
        {10, "config determinism", criterion_determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        std::ostringstream detail;
        try {
            criterion.run(detail);
            std::cout << "[PASS] criterion " << criterion.id << ": " << criterion.name << " ("
                      << detail.str() << ")\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] criterion " << criterion.id << ": " << criterion.name << " - "
                      << e.what() << "\n";
        }
        std::cout.flush();
    }
    if (failures != 0) std::cout << failures << " criteria failed\n";
    return failures;
}
