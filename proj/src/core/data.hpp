#pragma once

// Vintage ingestion and the monthly observation grid.
//
// CSV layout: header `date,value`; dates `YYYY-MM` (monthly) or `YYYY-Qn`
// (quarterly). A vintage is a directory named `YYYY-MM-DD` holding gdp.csv
// (quarterly levels) and related.csv (monthly levels).

#include "modelspec.hpp"
#include "panel.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewnow {

struct MonthlySeries {
    YearMonth start;
    std::vector<double> values;

    YearMonth end() const { return start.plus(static_cast<int>(values.size()) - 1); }
};

struct QuarterlySeries {
    Quarter start;
    std::vector<double> values;

    Quarter end() const { return start.plus(static_cast<int>(values.size()) - 1); }
};

struct Vintage {
    std::string as_of;  // YYYY-MM-DD
    QuarterlySeries gdp;
    MonthlySeries related;

    /// Non-empty, strictly positive levels; throws std::invalid_argument.
    void validate() const;
};

/// Raised for malformed CSV input; the message names the source and row.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

MonthlySeries parse_monthly_csv(std::istream& in, const std::string& source);
QuarterlySeries parse_quarterly_csv(std::istream& in, const std::string& source);
MonthlySeries read_monthly_csv(const std::filesystem::path& path);
QuarterlySeries read_quarterly_csv(const std::filesystem::path& path);

void write_monthly_csv(const std::filesystem::path& path, const MonthlySeries& s);
void write_quarterly_csv(const std::filesystem::path& path, const QuarterlySeries& s);

/// Reads `dir`/gdp.csv and `dir`/related.csv; as_of is the directory name.
Vintage load_vintage(const std::filesystem::path& dir);
/// Writes `root`/<as_of>/{gdp,related}.csv.
void write_vintage(const std::filesystem::path& root, const Vintage& v);

/// ln L_t - ln L_{t-step}; the first `step` entries are empty.
std::vector<std::optional<double>> log_diff(const std::vector<double>& levels, int step);

/// Monthly grid from the first related month to the later of the last related
/// month and the last GDP quarter. GDP growth sits at quarter-end months; the
/// related series is monthly growth or rolling quarterly growth per `spec`.
ObservationPanel align_panel(const Vintage& v, const ModelSpec& spec);

struct NowcastStep {
    int step = 0;                // 4 (earliest) .. 1 (last before release)
    Quarter target;
    YearMonth release_month;     // when the information set becomes available
    std::string timing;          // "late" or "early" in release_month
    YearMonth related_through;   // last related-series month in the set
    Quarter gdp_through;         // last GDP quarter in the set
};

/// Steps 4, 3, 2, 1 in time order for `target`.
std::vector<NowcastStep> nowcast_schedule(Quarter target);

/// Copy of `panel` restricted to the information set of (target, step) and
/// extended with empty months up to the target quarter's last month.
ObservationPanel truncate_to_step(const ObservationPanel& panel, Quarter target, int step);

struct FetchError {
    std::string as_of;
    std::string message;
};

struct FetchResult {
    std::vector<Vintage> vintages;
    std::vector<FetchError> errors;
};

/// Loads every vintage dated within [from, to] (inclusive, YYYY-MM-DD).
/// `endpoint` is a local directory, a file:// URL, or an http:// base URL
/// serving `vintages.txt` (one date per line) and `<date>/{gdp,related}.csv`.
/// Failures are collected per vintage.
FetchResult fetch_vintages(const std::string& endpoint, const std::string& from, const std::string& to);

/// Calendar-quarter growth of a monthly series: log difference of 3-month
/// sums over complete quarters.
QuarterlySeries calendar_quarter_growth(const MonthlySeries& levels);

struct CorrelationDiagnostic {
    double correlation = 0.0;
    std::size_t quarters = 0;
    bool in_band = false;  // correlation within [0.6, 1.0]
};

/// Correlation of quarterly GDP growth with calendar-quarter growth of the
/// related series over their common quarters.
CorrelationDiagnostic correlation_diagnostic(const Vintage& v);

}  // namespace skewnow
