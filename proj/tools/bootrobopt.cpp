// bootrobopt: experiment CLI for bootstrap-robust portfolio construction and
// trend-strategy tuning.
//
// Subcommands:
//   ingest     normalize a price CSV into the canonical wide layout
//   synth      generate a synthetic price panel
//   portfolio  expanding-window optimizer comparison
//   tune       per-asset lookback selection with train/test evaluation
//
// Every experiment writes <out>/<experiment>/<run-id>/ containing the fully
// resolved config.json; re-running from that file reproduces the outputs
// byte for byte. --jobs only schedules work and is deliberately absent from
// config.json so reruns at any parallelism stay identical. Exit codes:
// 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bootrobopt/csv.hpp"
#include "bootrobopt/evaluate.hpp"
#include "bootrobopt/harness.hpp"
#include "bootrobopt/optimize.hpp"
#include "bootrobopt/panel.hpp"
#include "bootrobopt/resample.hpp"
#include "bootrobopt/strategy.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace bootrobopt;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt_or_undef(double v, int digits = -1) {
    if (std::isnan(v)) return kUndefined;
    return digits < 0 ? fmt_g17(v) : fmt_fixed(v, digits);
}

std::string fmt_opt(const std::optional<double>& v, int digits = -1) {
    return v ? fmt_or_undef(*v, digits) : std::string(kUndefined);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::uint64_t env_seed_fallback() {
    if (const char* env = std::getenv("BOOTROBOPT_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw ConfigError("BOOTROBOPT_SEED is not a valid unsigned integer");
        }
    }
    return 42;
}

ordered_json load_config_file(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
    std::ifstream in(path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("cannot parse config " + path + ": " + e.what());
    }
    return j;
}

template <typename T>
T get_or(const ordered_json& j, const std::string& key, const T& fallback) {
    if (j.contains(key)) return j.at(key).get<T>();
    return fallback;
}

ordered_json section(const ordered_json& j, const std::string& key) {
    return j.contains(key) ? j.at(key) : ordered_json::object();
}

// --- data block ----------------------------------------------------------

struct DataConfig {
    std::string panel_csv;  // empty -> synthetic panel
    std::string layout = "wide";
    std::string return_kind = "simple";
    SyntheticSpec synthetic;
};

ordered_json data_to_json(const DataConfig& d) {
    ordered_json j;
    j["panel_csv"] = d.panel_csv;
    j["layout"] = d.layout;
    j["return_kind"] = d.return_kind;
    ordered_json s;
    s["T"] = d.synthetic.T;
    s["d"] = d.synthetic.d;
    s["drift"] = d.synthetic.drift.size() > 0 ? d.synthetic.drift(0) : 0.0;
    s["vol"] = d.synthetic.vol.size() > 0 ? d.synthetic.vol(0) : 0.01;
    s["ar1"] = d.synthetic.ar1;
    s["cross_correlation"] = d.synthetic.cross_correlation;
    s["shift_fraction"] = d.synthetic.shift_fraction;
    s["shift_multiplier"] = d.synthetic.shift_multiplier;
    s["seed"] = d.synthetic.seed;
    j["synthetic"] = s;
    return j;
}

DataConfig data_from_json(const ordered_json& j, std::uint64_t master_seed) {
    DataConfig d;
    d.panel_csv = get_or<std::string>(j, "panel_csv", "");
    d.layout = get_or<std::string>(j, "layout", "wide");
    d.return_kind = get_or<std::string>(j, "return_kind", "simple");
    const ordered_json s = section(j, "synthetic");
    d.synthetic = SyntheticSpec::uniform(get_or<std::size_t>(s, "T", 756),
                                         get_or<std::size_t>(s, "d", 21),
                                         get_or<double>(s, "drift", 0.0004),
                                         get_or<double>(s, "vol", 0.012));
    d.synthetic.ar1 = get_or<double>(s, "ar1", 0.1);
    d.synthetic.cross_correlation = get_or<double>(s, "cross_correlation", 0.3);
    d.synthetic.shift_fraction = get_or<double>(s, "shift_fraction", -1.0);
    d.synthetic.shift_multiplier = get_or<double>(s, "shift_multiplier", 1.0);
    d.synthetic.seed = get_or<std::uint64_t>(s, "seed", master_seed);
    return d;
}

ReturnPanel resolve_panel(const DataConfig& d) {
    if (!d.panel_csv.empty()) {
        if (!fs::exists(d.panel_csv)) throw ConfigError("panel file not found: " + d.panel_csv);
        CsvSchema schema;
        schema.layout = d.layout == "long" ? CsvSchema::Layout::Long : CsvSchema::Layout::Wide;
        const auto loaded = load_csv(d.panel_csv, schema);
        const auto kind = d.return_kind == "log" ? ReturnKind::Log : ReturnKind::Simple;
        return to_returns(loaded.panel, kind);
    }
    return generate_synthetic(d.synthetic);
}

// --- bootstrap block -------------------------------------------------------

ordered_json bootstrap_to_json(const BootstrapSpec& b) {
    ordered_json j;
    j["method"] = to_string(b.method);
    j["block_length"] = b.block_length;
    j["count"] = b.count;
    j["seed"] = b.seed;
    return j;
}

BootstrapSpec bootstrap_from_json(const ordered_json& j, std::uint64_t master_seed) {
    BootstrapSpec b;
    b.method = bootstrap_method_from_string(get_or<std::string>(j, "method", "stationary"));
    b.block_length = get_or<std::size_t>(j, "block_length", 0);  // 0 = ceil(T^(1/3))
    b.count = get_or<std::size_t>(j, "count", 100);
    b.seed = get_or<std::uint64_t>(j, "seed", derive_seed(master_seed, 1));
    return b;
}

// --- portfolio block ---------------------------------------------------------

std::string method_name(const MethodSpec& m) {
    const auto pct = std::to_string(static_cast<int>(std::lround(m.level * 100)));
    switch (m.kind) {
        case MethodSpec::Kind::Ew: return "ew";
        case MethodSpec::Kind::Mvo: return "mvo";
        case MethodSpec::Kind::Rpo: return "rpo";
        case MethodSpec::Kind::BumvoPercentile: return "bumvo_" + pct;
        case MethodSpec::Kind::BumvoWorstcase: return "bumvo_wc_" + pct;
    }
    return "ew";
}

ordered_json portfolio_to_json(const PortfolioExperimentConfig& cfg, double vol_target_level) {
    ordered_json j;
    std::vector<std::string> methods;
    for (const auto& m : cfg.methods) methods.push_back(method_name(m));
    j["methods"] = methods;
    j["constraint"] = cfg.constraints.regime == ConstraintRegime::LongShort ? "long_short"
                      : cfg.constraints.regime == ConstraintRegime::Unconstrained
                          ? "unconstrained"
                          : "long_only";
    j["budget"] = cfg.constraints.budget;
    j["bound"] = cfg.constraints.bound;
    j["warmup"] = cfg.warmup;
    j["lambda"] = cfg.lambda;
    j["rpo_alpha"] = cfg.rpo_alpha;
    j["kappa2"] = cfg.kappa2;
    j["tc"] = cfg.tc;
    j["periods_per_year"] = cfg.periods_per_year;
    ordered_json ga;
    ga["learning_rate"] = cfg.ascent.learning_rate;
    ga["decay"] = cfg.ascent.decay;
    ga["tolerance"] = cfg.ascent.tolerance;
    ga["max_iters"] = cfg.ascent.max_iters;
    j["ascent"] = ga;
    j["vol_target"] = vol_target_level;
    return j;
}

PortfolioExperimentConfig portfolio_from_json(const ordered_json& j, double& vol_target_level) {
    PortfolioExperimentConfig cfg;
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& name : j.at("methods"))
            cfg.methods.push_back(MethodSpec::parse(name.get<std::string>()));
    }
    const auto constraint = get_or<std::string>(j, "constraint", "long_only");
    if (constraint == "long_short")
        cfg.constraints.regime = ConstraintRegime::LongShort;
    else if (constraint == "unconstrained")
        cfg.constraints.regime = ConstraintRegime::Unconstrained;
    else if (constraint == "long_only")
        cfg.constraints.regime = ConstraintRegime::LongOnly;
    else
        throw ConfigError("unknown constraint regime: " + constraint);
    cfg.constraints.budget = get_or<double>(j, "budget", 1.0);
    cfg.constraints.bound = get_or<double>(j, "bound", 1.0);
    cfg.warmup = get_or<std::size_t>(j, "warmup", 252);
    cfg.lambda = get_or<double>(j, "lambda", 1.0);
    cfg.rpo_alpha = get_or<double>(j, "rpo_alpha", 0.05);
    cfg.kappa2 = get_or<double>(j, "kappa2", -1.0);
    cfg.tc = get_or<double>(j, "tc", 0.0);
    cfg.periods_per_year = get_or<int>(j, "periods_per_year", 252);
    const ordered_json ga = section(j, "ascent");
    cfg.ascent.learning_rate = get_or<double>(ga, "learning_rate", 0.05);
    cfg.ascent.decay = get_or<double>(ga, "decay", 0.999);
    cfg.ascent.tolerance = get_or<double>(ga, "tolerance", 1e-8);
    cfg.ascent.max_iters = get_or<std::size_t>(ga, "max_iters", 10000);
    vol_target_level = get_or<double>(j, "vol_target", 0.20);
    return cfg;
}

// --- tune block ----------------------------------------------------------

ordered_json tune_to_json(const TuningExperimentConfig& cfg) {
    ordered_json j;
    j["grid"] = cfg.grid;
    j["train_fraction"] = cfg.split.train_fraction;
    std::vector<std::string> rules;
    for (const auto& r : cfg.rules) rules.push_back(r.name());
    j["rules"] = rules;
    j["utility"] = to_string(cfg.utility);
    j["tc"] = cfg.tc;
    j["forecast_scale"] = cfg.forecast_scale;
    j["charge_initial_entry"] = cfg.charge_initial_entry;
    j["periods_per_year"] = cfg.periods_per_year;
    j["ci_level"] = cfg.ci_level;
    j["literal_algorithm_reading"] = cfg.literal_algorithm_reading;
    return j;
}

TuningExperimentConfig tune_from_json(const ordered_json& j) {
    TuningExperimentConfig cfg;
    if (j.contains("grid")) cfg.grid = j.at("grid").get<std::vector<std::size_t>>();
    cfg.split.train_fraction = get_or<double>(j, "train_fraction", 0.8);
    if (j.contains("rules")) {
        cfg.rules.clear();
        for (const auto& name : j.at("rules"))
            cfg.rules.push_back(SelectionRule::parse(name.get<std::string>()));
    }
    const auto util = get_or<std::string>(j, "utility", "sharpe");
    if (util == "sharpe")
        cfg.utility = StrategyUtility::Sharpe;
    else if (util == "neg_maxdd")
        cfg.utility = StrategyUtility::NegMaxDrawdown;
    else
        throw ConfigError("unknown utility: " + util);
    cfg.tc = get_or<double>(j, "tc", 0.0005);
    cfg.forecast_scale = get_or<double>(j, "forecast_scale", 1.0);
    cfg.charge_initial_entry = get_or<bool>(j, "charge_initial_entry", true);
    cfg.periods_per_year = get_or<int>(j, "periods_per_year", 252);
    cfg.ci_level = get_or<double>(j, "ci_level", 0.95);
    cfg.literal_algorithm_reading = get_or<bool>(j, "literal_algorithm_reading", false);
    return cfg;
}

// --- run directory ----------------------------------------------------------

fs::path prepare_run_dir(const std::string& out_dir, const std::string& experiment,
                         ordered_json& resolved) {
    if (resolved["run_id"].get<std::string>().empty()) {
        ordered_json unnamed = resolved;
        unnamed.erase("run_id");
        resolved["run_id"] = hex16(fnv1a(unnamed.dump()));
    }
    const fs::path dir = fs::path(out_dir) / experiment / resolved["run_id"].get<std::string>();
    fs::create_directories(dir);
    return dir;
}

// --- subcommand bodies -------------------------------------------------------

int cmd_ingest(const std::string& input, const std::string& layout,
               const std::string& date_column, const std::string& output) {
    if (!fs::exists(input)) throw ConfigError("input file not found: " + input);
    CsvSchema schema;
    schema.layout = layout == "long" ? CsvSchema::Layout::Long : CsvSchema::Layout::Wide;
    schema.date_column = date_column;
    const auto loaded = load_csv(input, schema);
    const auto& p = loaded.panel;

    std::string csv = "date";
    for (const auto& a : p.assets) csv += "," + a;
    csv += "\n";
    for (std::size_t t = 0; t < p.rows(); ++t) {
        csv += p.dates[t];
        for (std::size_t k = 0; k < p.cols(); ++k)
            csv += "," +
                   fmt_g17(p.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)));
        csv += "\n";
    }
    write_file(output, csv);

    std::cout << "rows=" << p.rows() << " assets=" << p.cols() << " first=" << p.dates.front()
              << " last=" << p.dates.back() << " dropped=" << loaded.dropped_rows << "\n"
              << "wrote " << output << "\n";
    return 0;
}

int cmd_synth(const SyntheticSpec& spec, const std::string& output) {
    const ReturnPanel returns = generate_synthetic(spec);
    // compound to a price panel so the file round-trips through `ingest`
    std::string csv = "date";
    for (const auto& a : returns.assets) csv += "," + a;
    csv += "\n";
    Eigen::VectorXd price = Eigen::VectorXd::Constant(returns.values.cols(), 100.0);
    auto emit_row = [&](std::size_t t) {
        csv += synthetic_date(t);
        for (Eigen::Index k = 0; k < price.size(); ++k) csv += "," + fmt_g17(price(k));
        csv += "\n";
    };
    emit_row(0);
    for (Eigen::Index t = 0; t < returns.values.rows(); ++t) {
        price = price.cwiseProduct((1.0 + returns.values.row(t).transpose().array()).matrix());
        emit_row(static_cast<std::size_t>(t) + 1);
    }
    write_file(output, csv);
    std::cout << "wrote " << output << " (" << returns.rows() + 1 << " price rows, "
              << returns.cols() << " assets)\n";
    return 0;
}

int cmd_portfolio(const ordered_json& raw, const std::string& out_dir, unsigned jobs) {
    const auto master_seed = raw.at("seed").get<std::uint64_t>();
    DataConfig data;
    double vol_target_level = 0.20;
    PortfolioExperimentConfig cfg;
    try {
        data = data_from_json(section(raw, "data"), master_seed);
        cfg = portfolio_from_json(section(raw, "portfolio"), vol_target_level);
        cfg.bootstrap = bootstrap_from_json(section(raw, "bootstrap"), master_seed);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    cfg.jobs = jobs;

    ordered_json resolved;
    resolved["experiment"] = "portfolio";
    resolved["run_id"] = get_or<std::string>(raw, "run_id", "");
    resolved["seed"] = master_seed;
    resolved["data"] = data_to_json(data);
    resolved["bootstrap"] = bootstrap_to_json(cfg.bootstrap);
    resolved["portfolio"] = portfolio_to_json(cfg, vol_target_level);

    const ReturnPanel panel = resolve_panel(data);
    const fs::path dir = prepare_run_dir(out_dir, "portfolio", resolved);
    write_file(dir / "config.json", resolved.dump(2) + "\n");

    const auto result = run_portfolio_experiment(panel, cfg);

    std::string table = "method,E[R],Std(R),Sharpe,Sortino,AvgDD,MaxDD\n";
    std::string full = "method," + metric_csv_header() + "\n";
    for (const auto& run : result.runs) {
        const auto& m = run.report;
        table += run.label + "," + fmt_fixed(m.expected_return, 2) + "," +
                 fmt_fixed(m.std_dev, 2) + "," + fmt_opt(m.sharpe, 2) + "," +
                 fmt_opt(m.sortino, 2) + "," + fmt_fixed(m.avg_dd, 2) + "," +
                 fmt_fixed(m.max_dd, 2) + "\n";
        full += run.label + "," + to_csv_row(m) + "\n";
    }
    write_file(dir / "metrics.csv", table);
    write_file(dir / "metrics_full.csv", full);

    std::string weights = "method,step,date,asset,weight\n";
    for (const auto& run : result.runs) {
        for (std::size_t t = cfg.warmup; t < panel.rows(); ++t)
            for (std::size_t k = 0; k < panel.cols(); ++k)
                weights += run.label + "," + std::to_string(t) + "," + panel.dates[t] + "," +
                           panel.assets[k] + "," +
                           fmt_g17(run.weights(static_cast<Eigen::Index>(t),
                                               static_cast<Eigen::Index>(k))) +
                           "\n";
    }
    write_file(dir / "weights.csv", weights);

    for (const auto& run : result.runs) {
        std::string pnl = "date,ret,wealth,ret_vt,wealth_vt\n";
        PnlSeries vt = run.pnl;
        try {
            vt = vol_target(run.pnl, vol_target_level, cfg.periods_per_year);
        } catch (const std::exception&) {
            // zero-volatility series: keep the unscaled path in the vt columns
        }
        for (std::size_t t = 0; t < run.pnl.size(); ++t)
            pnl += run.pnl.dates[t] + "," + fmt_g17(run.pnl.values[t]) + "," +
                   fmt_g17(run.pnl.wealth[t + 1]) + "," + fmt_g17(vt.values[t]) + "," +
                   fmt_g17(vt.wealth[t + 1]) + "\n";
        write_file(dir / ("pnl_" + run.label + ".csv"), pnl);
        for (const auto& warning : run.warnings)
            std::cerr << "warning [" << run.label << "]: " << warning << "\n";
    }

    std::cout << "portfolio run " << resolved["run_id"].get<std::string>() << ": "
              << result.runs.size() << " methods over " << panel.rows() << " rows -> "
              << dir.string() << "\n";
    return 0;
}

int cmd_tune(const ordered_json& raw, const std::string& out_dir, unsigned jobs) {
    const auto master_seed = raw.at("seed").get<std::uint64_t>();
    DataConfig data;
    TuningExperimentConfig cfg;
    try {
        data = data_from_json(section(raw, "data"), master_seed);
        cfg = tune_from_json(section(raw, "tune"));
        cfg.bootstrap = bootstrap_from_json(section(raw, "bootstrap"), master_seed);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    cfg.jobs = jobs;

    ordered_json resolved;
    resolved["experiment"] = "tune";
    resolved["run_id"] = get_or<std::string>(raw, "run_id", "");
    resolved["seed"] = master_seed;
    resolved["data"] = data_to_json(data);
    resolved["bootstrap"] = bootstrap_to_json(cfg.bootstrap);
    resolved["tune"] = tune_to_json(cfg);

    const ReturnPanel panel = resolve_panel(data);
    const fs::path dir = prepare_run_dir(out_dir, "tune", resolved);
    write_file(dir / "config.json", resolved.dump(2) + "\n");

    const auto result = run_tuning_experiment(panel, cfg);

    std::string selection = "asset,rule,lookback,forecast_scale\n";
    for (const auto& row : result.rows)
        selection += row.asset + "," + row.rule + "," + std::to_string(row.selected.lookback) +
                     "," + fmt_g17(row.selected.forecast_scale) + "\n";
    write_file(dir / "selection.csv", selection);

    std::string gaps = "asset,rule,lookback,metric,train,test,gap\n";
    auto gap_line = [&](const AssetTuningRow& row, const std::string& metric, double train,
                        double test, double g) {
        gaps += row.asset + "," + row.rule + "," + std::to_string(row.selected.lookback) + "," +
                metric + "," + fmt_or_undef(train) + "," + fmt_or_undef(test) + "," +
                fmt_or_undef(g) + "\n";
    };
    auto opt_gap_line = [&](const AssetTuningRow& row, const std::string& metric,
                            const std::optional<double>& train, const std::optional<double>& test,
                            const std::optional<double>& g) {
        gaps += row.asset + "," + row.rule + "," + std::to_string(row.selected.lookback) + "," +
                metric + "," + fmt_opt(train) + "," + fmt_opt(test) + "," + fmt_opt(g) + "\n";
    };
    for (const auto& row : result.rows) {
        const auto& rep = row.report;
        gap_line(row, "expected_return", rep.train.expected_return, rep.test.expected_return,
                 rep.gap.expected_return);
        gap_line(row, "std_dev", rep.train.std_dev, rep.test.std_dev, rep.gap.std_dev);
        opt_gap_line(row, "sharpe", rep.train.sharpe, rep.test.sharpe, rep.gap.sharpe);
        opt_gap_line(row, "sortino", rep.train.sortino, rep.test.sortino, rep.gap.sortino);
        gap_line(row, "avg_dd", rep.train.avg_dd, rep.test.avg_dd, rep.gap.avg_dd);
        gap_line(row, "max_dd", rep.train.max_dd, rep.test.max_dd, rep.gap.max_dd);
        gap_line(row, "pct_positive", rep.train.pct_positive, rep.test.pct_positive,
                 rep.gap.pct_positive);
        gap_line(row, "avg_dd_abs", std::abs(rep.train.avg_dd), std::abs(rep.test.avg_dd),
                 rep.gap.avg_dd_abs);
        gap_line(row, "max_dd_abs", std::abs(rep.train.max_dd), std::abs(rep.test.max_dd),
                 rep.gap.max_dd_abs);
    }
    write_file(dir / "gaps.csv", gaps);

    const std::string metric_name = to_string(cfg.utility);
    std::string ci =
        "rule,metric,train_mean,train_lo,train_hi,test_mean,test_lo,test_hi,gap_mean,gap_lo,"
        "gap_hi,assets_used\n";
    for (const auto& row : result.ci)
        ci += row.rule + "," + metric_name + "," + fmt_or_undef(row.train.mean) + "," +
              fmt_or_undef(row.train.lo) + "," + fmt_or_undef(row.train.hi) + "," +
              fmt_or_undef(row.test.mean) + "," + fmt_or_undef(row.test.lo) + "," +
              fmt_or_undef(row.test.hi) + "," + fmt_or_undef(row.gap.mean) + "," +
              fmt_or_undef(row.gap.lo) + "," + fmt_or_undef(row.gap.hi) + "," +
              std::to_string(row.assets_used) + "\n";
    write_file(dir / "ci.csv", ci);

    for (const auto& [asset, reason] : result.skipped)
        std::cerr << "skipped " << asset << ": " << reason << "\n";
    std::cout << "tune run " << resolved["run_id"].get<std::string>() << ": "
              << result.rows.size() << " asset-rule rows, " << result.skipped.size()
              << " skipped -> " << dir.string() << "\n";
    return 0;
}

// --- flag assembly -------------------------------------------------------

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "results";
    std::string run_id;
    std::string panel_csv;
    std::string layout = "wide";
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned jobs = 1;
};

ordered_json assemble_config(const std::string& experiment, const CommonFlags& flags,
                             const std::vector<std::pair<std::string, ordered_json>>& overrides) {
    ordered_json config;
    if (!flags.config_path.empty()) config = load_config_file(flags.config_path);

    config["experiment"] = experiment;
    if (!flags.run_id.empty()) config["run_id"] = flags.run_id;
    if (!config.contains("run_id")) config["run_id"] = "";

    std::uint64_t seed = env_seed_fallback();
    if (config.contains("seed")) seed = config["seed"].get<std::uint64_t>();
    if (flags.seed_set) seed = flags.seed;
    config["seed"] = seed;

    if (!flags.panel_csv.empty()) {
        config["data"]["panel_csv"] = flags.panel_csv;
        config["data"]["layout"] = flags.layout;
    }

    for (const auto& [key, value] : overrides) {
        ordered_json* node = &config;
        std::string rest = key;
        for (auto dot = rest.find('.'); dot != std::string::npos; dot = rest.find('.')) {
            node = &(*node)[rest.substr(0, dot)];
            rest = rest.substr(dot + 1);
        }
        (*node)[rest] = value;
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bootstrap-robust portfolio optimization and strategy tuning"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "normalize a price CSV");
    std::string in_input, in_layout = "wide", in_date_column = "date", in_output = "panel.csv";
    ingest->add_option("--input", in_input, "source CSV")->required();
    ingest->add_option("--layout", in_layout, "wide|long");
    ingest->add_option("--date-column", in_date_column, "date column name (long layout)");
    ingest->add_option("--output", in_output, "normalized wide CSV to write");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic price panel");
    std::size_t sy_T = 756, sy_d = 21;
    double sy_drift = 0.0004, sy_vol = 0.012, sy_ar1 = 0.1, sy_rho = 0.3;
    double sy_shift_at = -1.0, sy_shift_mult = 1.0;
    std::uint64_t sy_seed = 0;
    bool sy_seed_set = false;
    std::string sy_output = "synthetic.csv";
    synth->add_option("--T", sy_T, "number of return periods");
    synth->add_option("--d", sy_d, "number of assets");
    synth->add_option("--drift", sy_drift, "per-period drift");
    synth->add_option("--vol", sy_vol, "per-period volatility");
    synth->add_option("--ar1", sy_ar1, "AR(1) coefficient");
    synth->add_option("--rho", sy_rho, "cross-correlation");
    synth->add_option("--shift-at", sy_shift_at, "regime-shift fraction (off outside (0,1))");
    synth->add_option("--shift-mult", sy_shift_mult, "post-shift drift multiplier");
    synth->add_option("--seed", sy_seed, "generator seed")->each([&](const std::string&) {
        sy_seed_set = true;
    });
    synth->add_option("--output", sy_output, "price CSV to write");

    auto add_common = [](CLI::App* cmd, CommonFlags& flags) {
        cmd->add_option("--config", flags.config_path, "JSON config (flags override it)");
        cmd->add_option("--out", flags.out_dir, "output root directory");
        cmd->add_option("--run-id", flags.run_id, "run identifier (default: config hash)");
        cmd->add_option("--panel", flags.panel_csv, "price CSV (omit for synthetic data)");
        cmd->add_option("--layout", flags.layout, "panel layout: wide|long");
        cmd->add_option("--seed", flags.seed, "master seed")->each([&flags](const std::string&) {
            flags.seed_set = true;
        });
        cmd->add_option("--jobs", flags.jobs, "parallel worker cap (outputs are jobs-invariant)");
    };

    // portfolio
    auto* portfolio = app.add_subcommand("portfolio", "expanding-window optimizer comparison");
    CommonFlags pf_flags;
    add_common(portfolio, pf_flags);
    std::vector<std::string> pf_methods;
    std::string pf_constraint;
    std::size_t pf_warmup = 0;
    std::size_t pf_replicates = 0;
    double pf_lambda = -1.0, pf_tc = -1.0;
    std::string pf_bootstrap_method;
    std::size_t pf_block = 0;
    bool pf_block_set = false;
    std::size_t pf_synth_T = 0, pf_synth_d = 0;
    portfolio
        ->add_option("--methods", pf_methods,
                     "ew|mvo|rpo|bumvo_<pct>|bumvo_wc_<pct> (comma separated)")
        ->delimiter(',');
    portfolio->add_option("--constraint", pf_constraint, "long_only|long_short|unconstrained");
    portfolio->add_option("--warmup", pf_warmup, "initial estimation window");
    portfolio->add_option("--replicates", pf_replicates, "bootstrap replicate count");
    portfolio->add_option("--lambda", pf_lambda, "risk aversion");
    portfolio->add_option("--tc", pf_tc, "proportional cost per unit turnover");
    portfolio->add_option("--bootstrap", pf_bootstrap_method,
                          "moving_block|circular_block|stationary");
    portfolio->add_option("--block-length", pf_block, "bootstrap block length (0 = auto)")
        ->each([&](const std::string&) { pf_block_set = true; });
    portfolio->add_option("--synth-T", pf_synth_T, "synthetic panel length");
    portfolio->add_option("--synth-d", pf_synth_d, "synthetic panel width");

    // tune
    auto* tune = app.add_subcommand("tune", "per-asset lookback tuning");
    CommonFlags tn_flags;
    add_common(tune, tn_flags);
    std::vector<std::size_t> tn_grid;
    std::vector<std::string> tn_rules;
    std::string tn_utility;
    double tn_train_fraction = -1.0, tn_tc = -1.0;
    std::size_t tn_replicates = 0;
    std::string tn_bootstrap_method;
    std::size_t tn_block = 0;
    bool tn_block_set = false;
    bool tn_literal = false;
    std::size_t tn_synth_T = 0, tn_synth_d = 0;
    double tn_shift_at = -2.0, tn_shift_mult = 99.0;
    tune->add_option("--grid", tn_grid, "lookback grid, trading days")->delimiter(',');
    tune->add_option("--rules", tn_rules, "p10..p90|erm|cb1|cb2 (comma separated)")
        ->delimiter(',');
    tune->add_option("--utility", tn_utility, "sharpe|neg_maxdd");
    tune->add_option("--train-fraction", tn_train_fraction, "training share of the sample");
    tune->add_option("--tc", tn_tc, "proportional cost per unit turnover");
    tune->add_option("--replicates", tn_replicates, "bootstrap replicate count");
    tune->add_option("--bootstrap", tn_bootstrap_method, "moving_block|circular_block|stationary");
    tune->add_option("--block-length", tn_block, "bootstrap block length (0 = auto)")
        ->each([&](const std::string&) { tn_block_set = true; });
    tune->add_flag("--literal-percentile-across-candidates", tn_literal,
                   "two-stage percentile reading (mean per candidate, percentile across)");
    tune->add_option("--synth-T", tn_synth_T, "synthetic panel length");
    tune->add_option("--synth-d", tn_synth_d, "synthetic panel width");
    tune->add_option("--synth-shift-at", tn_shift_at, "synthetic regime-shift fraction");
    tune->add_option("--synth-shift-mult", tn_shift_mult, "synthetic post-shift drift multiplier");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) return cmd_ingest(in_input, in_layout, in_date_column, in_output);

        if (*synth) {
            SyntheticSpec spec = SyntheticSpec::uniform(sy_T, sy_d, sy_drift, sy_vol);
            spec.ar1 = sy_ar1;
            spec.cross_correlation = sy_rho;
            spec.shift_fraction = sy_shift_at;
            spec.shift_multiplier = sy_shift_mult;
            spec.seed = sy_seed_set ? sy_seed : env_seed_fallback();
            return cmd_synth(spec, sy_output);
        }

        if (*portfolio) {
            std::vector<std::pair<std::string, ordered_json>> overrides;
            if (!pf_methods.empty()) overrides.emplace_back("portfolio.methods", pf_methods);
            if (!pf_constraint.empty())
                overrides.emplace_back("portfolio.constraint", pf_constraint);
            if (pf_warmup > 0) overrides.emplace_back("portfolio.warmup", pf_warmup);
            if (pf_lambda >= 0.0) overrides.emplace_back("portfolio.lambda", pf_lambda);
            if (pf_tc >= 0.0) overrides.emplace_back("portfolio.tc", pf_tc);
            if (pf_replicates > 0) overrides.emplace_back("bootstrap.count", pf_replicates);
            if (!pf_bootstrap_method.empty())
                overrides.emplace_back("bootstrap.method", pf_bootstrap_method);
            if (pf_block_set) overrides.emplace_back("bootstrap.block_length", pf_block);
            if (pf_synth_T > 0) overrides.emplace_back("data.synthetic.T", pf_synth_T);
            if (pf_synth_d > 0) overrides.emplace_back("data.synthetic.d", pf_synth_d);
            const auto config = assemble_config("portfolio", pf_flags, overrides);
            return cmd_portfolio(config, pf_flags.out_dir, pf_flags.jobs);
        }

        if (*tune) {
            std::vector<std::pair<std::string, ordered_json>> overrides;
            if (!tn_grid.empty()) overrides.emplace_back("tune.grid", tn_grid);
            if (!tn_rules.empty()) overrides.emplace_back("tune.rules", tn_rules);
            if (!tn_utility.empty()) overrides.emplace_back("tune.utility", tn_utility);
            if (tn_train_fraction > 0.0)
                overrides.emplace_back("tune.train_fraction", tn_train_fraction);
            if (tn_tc >= 0.0) overrides.emplace_back("tune.tc", tn_tc);
            if (tn_literal) overrides.emplace_back("tune.literal_algorithm_reading", true);
            if (tn_replicates > 0) overrides.emplace_back("bootstrap.count", tn_replicates);
            if (!tn_bootstrap_method.empty())
                overrides.emplace_back("bootstrap.method", tn_bootstrap_method);
            if (tn_block_set) overrides.emplace_back("bootstrap.block_length", tn_block);
            if (tn_synth_T > 0) overrides.emplace_back("data.synthetic.T", tn_synth_T);
            if (tn_synth_d > 0) overrides.emplace_back("data.synthetic.d", tn_synth_d);
            if (tn_shift_at > -1.5) overrides.emplace_back("data.synthetic.shift_fraction", tn_shift_at);
            if (tn_shift_mult < 98.0)
                overrides.emplace_back("data.synthetic.shift_multiplier", tn_shift_mult);
            const auto config = assemble_config("tune", tn_flags, overrides);
            return cmd_tune(config, tn_flags.out_dir, tn_flags.jobs);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
