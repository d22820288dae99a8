#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace skewnow {

/// Calendar month; months are 1..12.
struct YearMonth {
    int year = 1970;
    int month = 1;

    int ordinal() const { return year * 12 + (month - 1); }
    static YearMonth from_ordinal(int o) { return {o / 12, o % 12 + 1}; }
    YearMonth plus(int months) const { return from_ordinal(ordinal() + months); }
    bool is_quarter_end() const { return month % 3 == 0; }

    std::string str() const;                      // "YYYY-MM"
    static YearMonth parse(const std::string& s);  // throws std::invalid_argument

    friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

/// Calendar quarter; quarters are 1..4.
struct Quarter {
    int year = 1970;
    int quarter = 1;

    int ordinal() const { return year * 4 + (quarter - 1); }
    static Quarter from_ordinal(int o) { return {o / 4, o % 4 + 1}; }
    Quarter plus(int q) const { return from_ordinal(ordinal() + q); }
    YearMonth first_month() const { return {year, 3 * quarter - 2}; }
    YearMonth last_month() const { return {year, 3 * quarter}; }
    static Quarter of(YearMonth m) { return {m.year, (m.month - 1) / 3 + 1}; }

    std::string str() const;                    // "YYYY-Qn"
    static Quarter parse(const std::string& s);  // throws std::invalid_argument

    friend auto operator<=>(const Quarter&, const Quarter&) = default;
};

enum class FrequencyTag { quarterly_at_month3, monthly, rolling_quarterly };

std::string to_string(FrequencyTag f);

/// Bivariate monthly-grid observations. Series 0 is GDP growth, series 1 the
/// related indicator. A slot is used only when its mask entry is set.
struct ObservationPanel {
    std::vector<YearMonth> months;
    std::array<std::vector<double>, 2> y;
    std::array<std::vector<unsigned char>, 2> mask;
    std::array<FrequencyTag, 2> frequency{FrequencyTag::quarterly_at_month3, FrequencyTag::monthly};

    std::size_t size() const { return months.size(); }
    bool observed(std::size_t series, std::size_t t) const { return mask[series][t] != 0; }
    std::size_t observation_count() const;

    /// Index of `m` in the grid, or -1.
    long index_of(YearMonth m) const;

    /// Throws std::invalid_argument if sizes disagree, the grid has gaps, GDP
    /// appears outside quarter-end months, or an observed value is not finite.
    void validate() const;
};

}  // namespace skewnow
