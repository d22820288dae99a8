#include "data.hpp"

#include "format.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace skewnow {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct Row {
    std::string date;
    double value;
    std::size_t line;
};

std::vector<Row> parse_rows(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t n = 0;
    if (!std::getline(in, line)) throw ParseError(source + ": empty file");
    ++n;
    std::string header = trim(line);
    if (header.size() >= 3 && header.compare(0, 3, "\xEF\xBB\xBF") == 0) header = header.substr(3);
    if (header != "date,value") throw ParseError(source + ": row 1: expected header 'date,value'");

    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++n;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto comma = t.find(',');
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
            throw ParseError(source + ": row " + std::to_string(n) + ": expected two fields");
        }
        const std::string date = trim(t.substr(0, comma));
        const std::string field = trim(t.substr(comma + 1));
        if (field.empty()) throw ParseError(source + ": row " + std::to_string(n) + ": missing value");
        char* end = nullptr;
        const double v = std::strtod(field.c_str(), &end);
        if (end != field.c_str() + field.size() || !std::isfinite(v)) {
            throw ParseError(source + ": row " + std::to_string(n) + ": invalid value '" + field + "'");
        }
        rows.push_back({date, v, n});
    }
    if (rows.empty()) throw ParseError(source + ": no data rows");
    return rows;
}

template <typename Period>
std::pair<Period, std::vector<double>> contiguous(const std::vector<Row>& rows, const std::string& source,
                                                  const char* what)
{
    std::vector<double> values;
    Period start{};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Period p;
        try {
            p = Period::parse(rows[i].date);
        } catch (const std::exception&) {
            throw ParseError(source + ": row " + std::to_string(rows[i].line) + ": expected a " + what + " date, got '" +
                             rows[i].date + "'");
        }
        if (i == 0) {
            start = p;
        } else if (p.ordinal() != start.ordinal() + static_cast<int>(i)) {
            throw ParseError(source + ": row " + std::to_string(rows[i].line) +
                             ": dates must be consecutive and increasing");
        }
        values.push_back(rows[i].value);
    }
    return {start, std::move(values)};
}

std::ifstream open_input(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

bool is_date_name(const std::string& s)
{
    static const std::regex re(R"(\d{4}-\d{2}-\d{2})");
    return std::regex_match(s, re);
}

struct HttpBase {
    std::string host;  // scheme://host[:port]
    std::string path;  // without trailing slash
};

HttpBase split_url(const std::string& url)
{
    static const std::regex re(R"((https?://[^/]+)(/.*)?)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw std::invalid_argument("not an http URL: " + url);
    std::string path = m[2].matched ? m[2].str() : "";
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {m[1].str(), path};
}

std::string http_get(httplib::Client& client, const std::string& path)
{
    auto res = client.Get(path);
    if (!res) throw std::runtime_error("GET " + path + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw std::runtime_error("GET " + path + " returned status " + std::to_string(res->status));
    return res->body;
}

}  // namespace

void Vintage::validate() const
{
    if (gdp.values.empty() || related.values.empty()) throw std::invalid_argument("vintage " + as_of + " is empty");
    for (double v : gdp.values)
        if (!(v > 0.0)) throw std::invalid_argument("vintage " + as_of + ": GDP levels must be positive");
    for (double v : related.values)
        if (!(v > 0.0)) throw std::invalid_argument("vintage " + as_of + ": related levels must be positive");
}

MonthlySeries parse_monthly_csv(std::istream& in, const std::string& source)
{
    auto [start, values] = contiguous<YearMonth>(parse_rows(in, source), source, "monthly");
    return {start, std::move(values)};
}

QuarterlySeries parse_quarterly_csv(std::istream& in, const std::string& source)
{
    auto [start, values] = contiguous<Quarter>(parse_rows(in, source), source, "quarterly");
    return {start, std::move(values)};
}

MonthlySeries read_monthly_csv(const fs::path& path)
{
    auto in = open_input(path);
    return parse_monthly_csv(in, path.string());
}

QuarterlySeries read_quarterly_csv(const fs::path& path)
{
    auto in = open_input(path);
    return parse_quarterly_csv(in, path.string());
}

void write_monthly_csv(const fs::path& path, const MonthlySeries& s)
{
    auto out = open_output(path);
    out << "date,value\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        out << s.start.plus(static_cast<int>(i)).str() << ',' << format_number(s.values[i], 12) << '\n';
    }
}

void write_quarterly_csv(const fs::path& path, const QuarterlySeries& s)
{
    auto out = open_output(path);
    out << "date,value\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        out << s.start.plus(static_cast<int>(i)).str() << ',' << format_number(s.values[i], 12) << '\n';
    }
}

Vintage load_vintage(const fs::path& dir)
{
    Vintage v;
    v.as_of = dir.filename().string();
    if (v.as_of.empty()) v.as_of = dir.parent_path().filename().string();
    v.gdp = read_quarterly_csv(dir / "gdp.csv");
    v.related = read_monthly_csv(dir / "related.csv");
    v.validate();
    return v;
}

void write_vintage(const fs::path& root, const Vintage& v)
{
    write_quarterly_csv(root / v.as_of / "gdp.csv", v.gdp);
    write_monthly_csv(root / v.as_of / "related.csv", v.related);
}

std::vector<std::optional<double>> log_diff(const std::vector<double>& levels, int step)
{
    if (step < 1) throw std::invalid_argument("log_diff step must be positive");
    for (double l : levels)
        if (!(l > 0.0)) throw std::domain_error("log_diff requires positive levels");
    std::vector<std::optional<double>> out(levels.size());
    for (std::size_t t = static_cast<std::size_t>(step); t < levels.size(); ++t) {
        out[t] = std::log(levels[t]) - std::log(levels[t - static_cast<std::size_t>(step)]);
    }
    return out;
}

ObservationPanel align_panel(const Vintage& v, const ModelSpec& spec)
{
    v.validate();
    const bool rolling = spec.related_frequency == RelatedFrequency::rolling_quarterly;
    const auto gdp_growth = log_diff(v.gdp.values, 1);
    const auto rel_growth = log_diff(v.related.values, rolling ? 3 : 1);

    const YearMonth first = v.related.start;
    const YearMonth last = std::max(v.related.end(), v.gdp.end().last_month());
    const int n = last.ordinal() - first.ordinal() + 1;

    ObservationPanel p;
    p.frequency = {FrequencyTag::quarterly_at_month3, rolling ? FrequencyTag::rolling_quarterly : FrequencyTag::monthly};
    for (int i = 0; i < n; ++i) p.months.push_back(first.plus(i));
    for (int s = 0; s < 2; ++s) {
        p.y[s].assign(static_cast<std::size_t>(n), 0.0);
        p.mask[s].assign(static_cast<std::size_t>(n), 0);
    }
    for (std::size_t i = 0; i < rel_growth.size(); ++i) {
        if (!rel_growth[i]) continue;
        p.y[1][i] = *rel_growth[i];
        p.mask[1][i] = 1;
    }
    std::size_t gdp_count = 0;
    for (std::size_t q = 0; q < gdp_growth.size(); ++q) {
        if (!gdp_growth[q]) continue;
        const int idx = v.gdp.start.plus(static_cast<int>(q)).last_month().ordinal() - first.ordinal();
        if (idx < 0 || idx >= n) continue;
        p.y[0][static_cast<std::size_t>(idx)] = *gdp_growth[q];
        p.mask[0][static_cast<std::size_t>(idx)] = 1;
        ++gdp_count;
    }
    if (gdp_count == 0) throw std::invalid_argument("vintage " + v.as_of + ": GDP and related series do not overlap");
    p.validate();
    return p;
}

std::vector<NowcastStep> nowcast_schedule(Quarter target)
{
    std::vector<NowcastStep> out;
    const YearMonth first = target.first_month();
    for (int step = 4; step >= 1; --step) {
        NowcastStep s;
        s.step = step;
        s.target = target;
        s.related_through = target.last_month().plus(-(step - 1));
        s.gdp_through = target.plus(-1);
        // Step 4 follows the previous quarter's GDP release late in the first
        // month; the others follow the related release early in the next month.
        s.release_month = step == 4 ? first : s.related_through.plus(1);
        s.timing = step == 4 ? "late" : "early";
        out.push_back(s);
    }
    return out;
}

ObservationPanel truncate_to_step(const ObservationPanel& panel, Quarter target, int step)
{
    if (step < 1 || step > 4) throw std::invalid_argument("nowcast step must be 1..4");
    if (panel.size() == 0) throw std::invalid_argument("empty panel");
    const YearMonth end = target.last_month();
    const YearMonth related_through = end.plus(-(step - 1));
    const YearMonth gdp_through = target.plus(-1).last_month();
    if (end < panel.months.front()) throw std::invalid_argument("target quarter precedes the panel");

    ObservationPanel out;
    out.frequency = panel.frequency;
    const int n = end.ordinal() - panel.months.front().ordinal() + 1;
    for (int i = 0; i < n; ++i) {
        const YearMonth m = panel.months.front().plus(i);
        out.months.push_back(m);
        const bool inside = static_cast<std::size_t>(i) < panel.size();
        for (int s = 0; s < 2; ++s) {
            const YearMonth limit = s == 0 ? gdp_through : related_through;
            const bool keep = inside && panel.observed(s, i) && m <= limit;
            out.y[s].push_back(keep ? panel.y[s][i] : 0.0);
            out.mask[s].push_back(keep ? 1 : 0);
        }
    }
    return out;
}

FetchResult fetch_vintages(const std::string& endpoint, const std::string& from, const std::string& to)
{
    FetchResult out;
    if (to < from) return out;
    const auto in_range = [&](const std::string& d) { return is_date_name(d) && d >= from && d <= to; };

    if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0) {
        const HttpBase base = split_url(endpoint);
        httplib::Client client(base.host);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        std::string listing;
        try {
            listing = http_get(client, base.path + "/vintages.txt");
        } catch (const std::exception& e) {
            out.errors.push_back({"", e.what()});
            return out;
        }
        std::istringstream lines(listing);
        std::vector<std::string> dates;
        for (std::string l; std::getline(lines, l);) {
            l = trim(l);
            if (in_range(l)) dates.push_back(l);
        }
        std::sort(dates.begin(), dates.end());
        for (const auto& d : dates) {
            try {
                Vintage v;
                v.as_of = d;
                std::istringstream g(http_get(client, base.path + "/" + d + "/gdp.csv"));
                v.gdp = parse_quarterly_csv(g, endpoint + "/" + d + "/gdp.csv");
                std::istringstream r(http_get(client, base.path + "/" + d + "/related.csv"));
                v.related = parse_monthly_csv(r, endpoint + "/" + d + "/related.csv");
                v.validate();
                out.vintages.push_back(std::move(v));
            } catch (const std::exception& e) {
                out.errors.push_back({d, e.what()});
            }
        }
        return out;
    }

    fs::path root = endpoint.rfind("file://", 0) == 0 ? fs::path(endpoint.substr(7)) : fs::path(endpoint);
    if (!fs::is_directory(root)) {
        out.errors.push_back({"", "not a directory: " + root.string()});
        return out;
    }
    std::vector<std::string> dates;
    for (const auto& entry : fs::directory_iterator(root)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_directory() && in_range(name)) dates.push_back(name);
    }
    std::sort(dates.begin(), dates.end());
    for (const auto& d : dates) {
        try {
            out.vintages.push_back(load_vintage(root / d));
        } catch (const std::exception& e) {
            out.errors.push_back({d, e.what()});
        }
    }
    return out;
}

QuarterlySeries calendar_quarter_growth(const MonthlySeries& levels)
{
    // First complete quarter.
    int offset = (3 - (levels.start.month - 1) % 3) % 3;
    std::vector<double> sums;
    for (std::size_t i = static_cast<std::size_t>(offset); i + 2 < levels.values.size(); i += 3) {
        sums.push_back(levels.values[i] + levels.values[i + 1] + levels.values[i + 2]);
    }
    QuarterlySeries out;
    out.start = Quarter::of(levels.start.plus(offset)).plus(1);
    const auto g = log_diff(sums, 1);
    for (std::size_t i = 1; i < g.size(); ++i) out.values.push_back(*g[i]);
    return out;
}

CorrelationDiagnostic correlation_diagnostic(const Vintage& v)
{
    const QuarterlySeries rel = calendar_quarter_growth(v.related);
    const auto gdp = log_diff(v.gdp.values, 1);
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < rel.values.size(); ++i) {
        const int q = rel.start.plus(static_cast<int>(i)).ordinal() - v.gdp.start.ordinal();
        if (q < 1 || q >= static_cast<int>(gdp.size())) continue;
        pairs.emplace_back(*gdp[static_cast<std::size_t>(q)], rel.values[i]);
    }
    CorrelationDiagnostic d;
    d.quarters = pairs.size();
    if (pairs.size() < 3) return d;
    double mx = 0, my = 0;
    for (auto [a, b] : pairs) mx += a, my += b;
    mx /= pairs.size();
    my /= pairs.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (auto [a, b] : pairs) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    d.correlation = sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
    d.in_band = d.correlation >= 0.6 && d.correlation <= 1.0;
    return d;
}

}  // namespace skewnow
