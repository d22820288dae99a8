#pragma once

// Scoring rules and the pseudo real-time backtest.

#include "data.hpp"
#include "nowcast.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace skewnow {

inline constexpr double kDensityFloor = 1e-12;

/// Log of the grid density linearly interpolated at `realized`, floored at
/// log(1e-12); points outside the grid get the floor.
double log_score(const DensityNowcast& d, double realized);

/// Mean absolute error; throws std::invalid_argument on length mismatch or
/// empty input.
double mae(const std::vector<double>& points, const std::vector<double>& realized);

struct BacktestConfig {
    EstimationConfig estimation;
    std::size_t n_draws = 10000;
    /// Start each re-estimation from the previous vintage's estimate.
    bool warm_start = false;
    /// Named quarter lists, e.g. {"recession", {2020-Q1, 2020-Q2}}.
    std::map<std::string, std::vector<Quarter>> regimes;
    /// Called after each (model, vintage) cell; optional.
    std::function<void(const std::string&)> progress;
};

struct BacktestEntry {
    std::string model;
    std::string as_of;
    Quarter quarter;
    int step = 0;
    double log_score = 0.0;
    double abs_error = 0.0;
    double mean = 0.0;
    double lo90 = 0.0;
    double hi90 = 0.0;
    double realized = 0.0;
};

struct BacktestAggregate {
    std::string model;
    std::string regime;  // "all" or a configured regime name
    int step = 0;
    std::size_t count = 0;
    double mean_log_score = 0.0;
    double mae = 0.0;
};

struct BacktestFailure {
    std::string model;
    std::string as_of;
    std::string message;
};

struct BacktestReport {
    std::vector<BacktestEntry> entries;  // one per (model, quarter, step)
    std::vector<BacktestAggregate> aggregates;
    std::vector<BacktestFailure> failures;
};

/// The quarter a vintage nowcasts (the one after its last GDP quarter) and the
/// step implied by how many of its months the related series covers.
struct VintageTarget {
    Quarter quarter;
    int step = 4;
};
VintageTarget vintage_target(const Vintage& v);

/// First release of `q` in the vintages after index `after`, if any.
std::optional<double> first_release(const std::vector<Vintage>& vintages, std::size_t after, Quarter q);

/// Recomputes aggregates from the entries.
std::vector<BacktestAggregate> aggregate(const std::vector<BacktestEntry>& entries,
                                         const std::map<std::string, std::vector<Quarter>>& regimes);

BacktestReport backtest(const std::vector<Vintage>& vintages, const std::vector<ModelSpec>& specs,
                        const BacktestConfig& config, std::uint64_t seed);

/// Long-format CSV: model,quarter,step,metric,value.
void write_backtest_csv(const std::filesystem::path& path, const BacktestReport& report);
/// Aggregates, failures and entry count as JSON.
void write_backtest_json(const std::filesystem::path& path, const BacktestReport& report);
/// Reads the long-format CSV back into entries (as_of is not stored).
std::vector<BacktestEntry> read_backtest_csv(const std::filesystem::path& path);

}  // namespace skewnow
