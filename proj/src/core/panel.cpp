#include "panel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace skewnow {

std::string YearMonth::str() const
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

YearMonth YearMonth::parse(const std::string& s)
{
    int y = 0, m = 0;
    char tail = 0;
    if (s.size() != 7 || std::sscanf(s.c_str(), "%4d-%2d%c", &y, &m, &tail) != 2 || m < 1 || m > 12) {
        throw std::invalid_argument("bad year-month '" + s + "' (expected YYYY-MM)");
    }
    return {y, m};
}

std::string Quarter::str() const
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-Q%d", year, quarter);
    return buf;
}

Quarter Quarter::parse(const std::string& s)
{
    int y = 0, q = 0;
    char tail = 0;
    if (s.size() != 7 || std::sscanf(s.c_str(), "%4d-Q%1d%c", &y, &q, &tail) != 2 || q < 1 || q > 4) {
        throw std::invalid_argument("bad quarter '" + s + "' (expected YYYY-Qn)");
    }
    return {y, q};
}

std::string to_string(FrequencyTag f)
{
    switch (f) {
    case FrequencyTag::quarterly_at_month3: return "quarterly_at_month3";
    case FrequencyTag::monthly: return "monthly";
    case FrequencyTag::rolling_quarterly: return "rolling_quarterly";
    }
    return "unknown";
}

std::size_t ObservationPanel::observation_count() const
{
    std::size_t n = 0;
    for (const auto& m : mask)
        for (auto v : m) n += v != 0;
    return n;
}

long ObservationPanel::index_of(YearMonth m) const
{
    if (months.empty()) return -1;
    const long i = m.ordinal() - months.front().ordinal();
    return (i >= 0 && i < static_cast<long>(months.size())) ? i : -1;
}

void ObservationPanel::validate() const
{
    const std::size_t n = months.size();
    for (int s = 0; s < 2; ++s) {
        if (y[s].size() != n || mask[s].size() != n) throw std::invalid_argument("panel: series length mismatch");
    }
    for (std::size_t t = 1; t < n; ++t) {
        if (months[t].ordinal() != months[t - 1].ordinal() + 1) throw std::invalid_argument("panel: month grid has gaps");
    }
    for (std::size_t t = 0; t < n; ++t) {
        if (mask[0][t] && !months[t].is_quarter_end()) {
            throw std::invalid_argument("panel: GDP observed outside a quarter-end month at " + months[t].str());
        }
        for (int s = 0; s < 2; ++s) {
            if (mask[s][t] && !std::isfinite(y[s][t])) throw std::invalid_argument("panel: non-finite observation");
        }
    }
}

}  // namespace skewnow
