#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bootrobopt/csv.hpp"

namespace bootrobopt {

/// Aligned close-price panel: one row per trading day, one column per asset.
/// Dates are opaque ordered labels (ISO-8601 strings sort chronologically);
/// no calendar arithmetic is ever performed on them.
struct PricePanel {
    std::vector<std::string> dates;
    std::vector<std::string> assets;
    Eigen::MatrixXd values;  // T x d close prices

    [[nodiscard]] std::size_t rows() const { return dates.size(); }
    [[nodiscard]] std::size_t cols() const { return assets.size(); }
};

/// Aligned periodic-return panel, same labeling scheme as PricePanel.
struct ReturnPanel {
    std::vector<std::string> dates;
    std::vector<std::string> assets;
    Eigen::MatrixXd values;  // T x d returns per period

    [[nodiscard]] std::size_t rows() const { return dates.size(); }
    [[nodiscard]] std::size_t cols() const { return assets.size(); }

    [[nodiscard]] ReturnPanel column(std::size_t k) const {
        if (k >= cols()) throw std::invalid_argument("ReturnPanel::column: index out of range");
        ReturnPanel out;
        out.dates = dates;
        out.assets = {assets[k]};
        out.values = values.col(static_cast<Eigen::Index>(k));
        return out;
    }
};

enum class ReturnKind { Simple, Log };

/// Contiguous, order-preserving train/test split by row count.
struct SplitSpec {
    double train_fraction = 0.8;
};

struct CsvSchema {
    enum class Layout { Wide, Long };
    Layout layout = Layout::Wide;
    /// Header name of the date column. For the wide layout the first column
    /// is the date regardless of name; for the long layout this selects the
    /// date column, with `asset` and `price` located by those exact names.
    std::string date_column = "date";
};

struct LoadResult {
    PricePanel panel;
    std::size_t dropped_rows = 0;
};

namespace detail {

inline bool is_missing_token(const std::string& s) {
    return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "null";
}

inline bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

inline bool looks_like_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') return false;
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

inline void validate_panel_labels(const std::vector<std::string>& dates,
                                  const std::vector<std::string>& assets) {
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i - 1] < dates[i]))
            throw std::runtime_error("panel dates not strictly increasing at '" + dates[i] + "'");
    std::vector<std::string> sorted_assets = assets;
    std::sort(sorted_assets.begin(), sorted_assets.end());
    if (std::adjacent_find(sorted_assets.begin(), sorted_assets.end()) != sorted_assets.end())
        throw std::runtime_error("duplicate asset identifiers in panel");
}

}  // namespace detail

/// Load a price panel from CSV.
///
/// Wide layout: first column holds ISO-8601 dates, every other column is one
/// asset. Long layout: columns `date,asset,price` (date column name
/// configurable). Rows are sorted ascending by date. Cleaning is listwise:
/// any row with a missing, non-finite, or non-positive price is dropped
/// panel-wide and counted in LoadResult::dropped_rows. A malformed date or a
/// non-empty cell that fails to parse as a number is an error naming the
/// offending row and column.
inline LoadResult load_csv(const std::string& path, const CsvSchema& schema = {}) {
    const CsvTable table = read_csv(path);
    std::vector<std::string> dates;
    std::vector<std::string> assets;
    std::vector<std::vector<double>> row_values;  // parallel to dates
    std::size_t dropped = 0;

    auto fail = [&](std::size_t file_row, const std::string& column, const std::string& what) {
        throw std::runtime_error(path + ": row " + std::to_string(file_row) + ", column '" +
                                 column + "': " + what);
    };

    if (schema.layout == CsvSchema::Layout::Wide) {
        if (table.header.size() < 2)
            throw std::runtime_error(path + ": wide layout needs a date column and >= 1 asset");
        assets.assign(table.header.begin() + 1, table.header.end());
        const std::size_t d = assets.size();
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& fields = table.rows[r];
            const std::size_t file_row = r + 2;  // 1-based, after header
            if (fields.size() != d + 1)
                fail(file_row, "-", "expected " + std::to_string(d + 1) + " fields, got " +
                                        std::to_string(fields.size()));
            if (!detail::looks_like_iso_date(fields[0]))
                fail(file_row, table.header[0], "unparseable date '" + fields[0] + "'");
            std::vector<double> row(d);
            bool drop = false;
            for (std::size_t k = 0; k < d; ++k) {
                const auto& cell = fields[k + 1];
                if (detail::is_missing_token(cell)) {
                    drop = true;
                    continue;
                }
                double v = 0.0;
                if (!detail::parse_number(cell, v))
                    fail(file_row, assets[k], "unparseable number '" + cell + "'");
                if (!std::isfinite(v) || v <= 0.0) drop = true;
                row[k] = v;
            }
            if (drop) {
                ++dropped;
                continue;
            }
            dates.push_back(fields[0]);
            row_values.push_back(std::move(row));
        }
    } else {
        auto column_index = [&](const std::string& name) -> std::size_t {
            const auto it = std::find(table.header.begin(), table.header.end(), name);
            if (it == table.header.end())
                throw std::runtime_error(path + ": long layout is missing column '" + name + "'");
            return static_cast<std::size_t>(it - table.header.begin());
        };
        const std::size_t date_col = column_index(schema.date_column);
        const std::size_t asset_col = column_index("asset");
        const std::size_t price_col = column_index("price");

        // date -> asset -> price; assets kept in first-appearance order
        std::map<std::string, std::map<std::string, double>> cells;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& fields = table.rows[r];
            const std::size_t file_row = r + 2;
            if (fields.size() != table.header.size())
                fail(file_row, "-", "wrong field count");
            const std::string& date = fields[date_col];
            const std::string& asset = fields[asset_col];
            const std::string& cell = fields[price_col];
            if (!detail::looks_like_iso_date(date))
                fail(file_row, schema.date_column, "unparseable date '" + date + "'");
            if (std::find(assets.begin(), assets.end(), asset) == assets.end())
                assets.push_back(asset);
            if (detail::is_missing_token(cell)) continue;  // treated as an absent observation
            double v = 0.0;
            if (!detail::parse_number(cell, v))
                fail(file_row, "price", "unparseable number '" + cell + "'");
            auto [it, inserted] = cells[date].emplace(asset, v);
            if (!inserted)
                fail(file_row, "price", "duplicate (date, asset) pair '" + date + "," + asset + "'");
        }
        for (const auto& [date, by_asset] : cells) {
            std::vector<double> row(assets.size());
            bool drop = false;
            for (std::size_t k = 0; k < assets.size(); ++k) {
                const auto it = by_asset.find(assets[k]);
                if (it == by_asset.end() || !std::isfinite(it->second) || it->second <= 0.0) {
                    drop = true;
                    break;
                }
                row[k] = it->second;
            }
            if (drop) {
                ++dropped;
                continue;
            }
            dates.push_back(date);  // std::map iterates dates in ascending order
            row_values.push_back(std::move(row));
        }
    }

    if (dates.empty()) throw std::runtime_error(path + ": no usable rows after cleaning");

    // sort by date (wide files may arrive unsorted)
    std::vector<std::size_t> order(dates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });

    PricePanel panel;
    panel.assets = assets;
    panel.dates.reserve(dates.size());
    panel.values.resize(static_cast<Eigen::Index>(dates.size()),
                        static_cast<Eigen::Index>(assets.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        panel.dates.push_back(dates[order[i]]);
        for (std::size_t k = 0; k < assets.size(); ++k)
            panel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                row_values[order[i]][k];
    }
    detail::validate_panel_labels(panel.dates, panel.assets);
    return LoadResult{std::move(panel), dropped};
}

/// Periodic returns from prices. Simple: p_t/p_{t-1} - 1. Log: ln(p_t/p_{t-1}),
/// which requires strictly positive prices. Output has T-1 rows labeled with
/// the dates of the later observation in each ratio.
inline ReturnPanel to_returns(const PricePanel& p, ReturnKind kind) {
    const auto T = static_cast<Eigen::Index>(p.rows());
    const auto d = static_cast<Eigen::Index>(p.cols());
    if (T < 2) throw std::invalid_argument("to_returns: need at least 2 price rows");
    ReturnPanel out;
    out.assets = p.assets;
    out.dates.assign(p.dates.begin() + 1, p.dates.end());
    out.values.resize(T - 1, d);
    for (Eigen::Index t = 1; t < T; ++t) {
        for (Eigen::Index k = 0; k < d; ++k) {
            const double prev = p.values(t - 1, k);
            const double cur = p.values(t, k);
            if (kind == ReturnKind::Log) {
                if (!(prev > 0.0 && cur > 0.0))
                    throw std::domain_error("to_returns: nonpositive price under log returns at '" +
                                            p.dates[static_cast<std::size_t>(t)] + "'");
                out.values(t - 1, k) = std::log(cur / prev);
            } else {
                out.values(t - 1, k) = cur / prev - 1.0;
            }
        }
    }
    return out;
}

/// Split into contiguous train/test segments: train takes the first
/// floor(train_fraction * T) rows, test the remainder.
inline std::pair<ReturnPanel, ReturnPanel> split(const ReturnPanel& r, const SplitSpec& s) {
    if (!(s.train_fraction > 0.0 && s.train_fraction < 1.0))
        throw std::invalid_argument("split: train_fraction must lie in (0,1)");
    const std::size_t T = r.rows();
    if (T < 5) throw std::invalid_argument("split: need at least 5 rows");
    const auto n_train = static_cast<std::size_t>(
        std::floor(s.train_fraction * static_cast<double>(T)));
    if (n_train == 0 || n_train == T)
        throw std::runtime_error("split: a segment would be empty");
    ReturnPanel train, test;
    train.assets = test.assets = r.assets;
    train.dates.assign(r.dates.begin(), r.dates.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.dates.assign(r.dates.begin() + static_cast<std::ptrdiff_t>(n_train), r.dates.end());
    train.values = r.values.topRows(static_cast<Eigen::Index>(n_train));
    test.values = r.values.bottomRows(static_cast<Eigen::Index>(T - n_train));
    return {std::move(train), std::move(test)};
}

}  // namespace bootrobopt
