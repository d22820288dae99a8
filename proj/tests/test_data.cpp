#include "data.hpp"
#include "test_support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

using namespace skewnow;
using namespace skewnow::testing;

namespace {

Vintage make_vintage(const std::string& as_of, Quarter gdp_start, std::size_t quarters, YearMonth rel_start,
                     std::size_t months, std::uint64_t seed = 1)
{
    Vintage v;
    v.as_of = as_of;
    v.gdp.start = gdp_start;
    v.related.start = rel_start;
    const auto g = normals(quarters, seed, 0.01, 0.005);
    const auto r = normals(months, seed + 7, 0.01, 0.002);
    double level = 100.0;
    for (std::size_t i = 0; i < quarters; ++i) v.gdp.values.push_back(level *= std::exp(g[i]));
    level = 50.0;
    for (std::size_t i = 0; i < months; ++i) v.related.values.push_back(level *= std::exp(r[i]));
    return v;
}

void write_text(const std::filesystem::path& p, const std::string& s)
{
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p) << s;
}

}  // namespace

TEST_CASE("log differences")
{
    const auto d = log_diff({100.0, 102.0}, 1);
    CHECK_FALSE(d[0].has_value());
    CHECK(*d[1] == doctest::Approx(0.0198026273).epsilon(1e-9));
    for (const auto& v : log_diff(std::vector<double>(6, 3.0), 1)) {
        if (v) CHECK(*v == 0.0);
    }
    // Step 3 on monthly levels is rolling quarterly growth.
    const std::vector<double> lv = {10, 11, 12, 13, 15, 16};
    const auto q = log_diff(lv, 3);
    CHECK_FALSE(q[2].has_value());
    CHECK(*q[3] == doctest::Approx(std::log(13.0 / 10.0)));
    CHECK(*q[5] == doctest::Approx(std::log(16.0 / 12.0)));
}

TEST_CASE("CSV parsing")
{
    std::istringstream ok("date,value\n2019-11,1.5\n2019-12,1.6\n2020-01,1.7\n");
    const MonthlySeries m = parse_monthly_csv(ok, "ok.csv");
    CHECK(m.start == YearMonth{2019, 11});
    CHECK(m.values.size() == 3);
    CHECK(m.end() == YearMonth{2020, 1});

    std::istringstream q("date,value\n2019-Q4,100\n2020-Q1,95.5\n");
    const QuarterlySeries qs = parse_quarterly_csv(q, "q.csv");
    CHECK(qs.start == Quarter{2019, 4});
    CHECK(qs.end() == Quarter{2020, 1});

    const auto fails_at = [](const std::string& text, const std::string& fragment) {
        std::istringstream in(text);
        try {
            parse_monthly_csv(in, "bad.csv");
        } catch (const ParseError& e) {
            return std::string(e.what()).find(fragment) != std::string::npos;
        }
        return false;
    };
    CHECK(fails_at("", "empty"));
    CHECK(fails_at("when,what\n2019-01,1\n", "row 1"));
    CHECK(fails_at("date,value\n2019-01,1\n2019-02,\n", "row 3"));
    CHECK(fails_at("date,value\n2019-01,1\n2019-03,1\n", "row 3"));
    CHECK(fails_at("date,value\n2019-01,1\n2019-02,abc\n", "row 3"));
    CHECK(fails_at("date,value\n2019-01,1,2\n", "row 2"));
    CHECK(fails_at("date,value\n2019-Q1,1\n", "row 2"));
    CHECK(fails_at("date,value\n", "no data"));
}

TEST_CASE("vintage round trip and validation")
{
    TempDir dir("data_rt");
    const Vintage v = make_vintage("2020-04-28", {2010, 1}, 41, {2010, 1}, 123);
    write_vintage(dir.path, v);
    const Vintage back = load_vintage(dir / "2020-04-28");
    CHECK(back.as_of == "2020-04-28");
    CHECK(back.gdp.start == v.gdp.start);
    REQUIRE(back.related.values.size() == v.related.values.size());
    for (std::size_t i = 0; i < v.related.values.size(); ++i)
        CHECK(back.related.values[i] == doctest::Approx(v.related.values[i]).epsilon(1e-11));

    Vintage empty = v;
    empty.gdp.values.clear();
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
    CHECK_THROWS_AS(align_panel(empty, build_spec("DV")), std::invalid_argument);
    Vintage negative = v;
    negative.related.values[3] = -1.0;
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
    CHECK_THROWS(load_vintage(dir / "1999-01-01"));
}

TEST_CASE("panel alignment")
{
    // Related through March 2020, GDP through 2019-Q4: an early-April vintage.
    const Vintage early = make_vintage("2020-04-05", {2015, 1}, 20, {2015, 1}, 63);
    const ObservationPanel p = align_panel(early, build_spec("DV"));
    CHECK_NOTHROW(p.validate());
    CHECK(p.months.front() == YearMonth{2015, 1});
    CHECK(p.months.back() == YearMonth{2020, 3});
    const std::size_t n = p.size();
    CHECK(p.observed(1, n - 1));
    CHECK_FALSE(p.observed(0, n - 1));
    CHECK_FALSE(p.observed(0, n - 2));
    CHECK_FALSE(p.observed(0, n - 3));
    CHECK(p.observed(0, n - 4));
    CHECK_FALSE(p.observed(1, 0));
    CHECK(p.frequency[1] == FrequencyTag::monthly);

    // Late April: Q1 GDP sits at the March slot.
    Vintage late = early;
    late.as_of = "2020-04-28";
    late.gdp.values.push_back(late.gdp.values.back() * 0.95);
    const ObservationPanel pl = align_panel(late, build_spec("DV"));
    CHECK(pl.observed(0, pl.size() - 1));
    CHECK(pl.y[0][pl.size() - 1] == doctest::Approx(std::log(0.95)));

    // Rolling quarterly related growth for the shape models.
    const ObservationPanel rq = align_panel(early, build_spec("DVS_t"));
    CHECK(rq.frequency[1] == FrequencyTag::rolling_quarterly);
    CHECK_FALSE(rq.observed(1, 2));
    CHECK(rq.observed(1, 3));
    CHECK(rq.y[1][3] == doctest::Approx(std::log(early.related.values[3] / early.related.values[0])));

    // GDP growth read back from the panel equals log differences of the levels.
    const auto g = log_diff(late.gdp.values, 1);
    std::size_t k = 1;
    for (std::size_t t = 0; t < pl.size(); ++t) {
        if (!pl.observed(0, t)) continue;
        CHECK(pl.months[t] == late.gdp.start.plus(static_cast<int>(k)).last_month());
        CHECK(pl.y[0][t] == doctest::Approx(*g[k]).epsilon(1e-14));
        ++k;
    }
    CHECK(k == late.gdp.values.size());

    // GDP running past the related series extends the grid.
    Vintage ahead = make_vintage("2020-07-30", {2015, 1}, 22, {2015, 1}, 63);
    const ObservationPanel pa = align_panel(ahead, build_spec("DV"));
    CHECK(pa.months.back() == YearMonth{2020, 6});
    CHECK_FALSE(pa.observed(1, pa.size() - 1));
}

TEST_CASE("nowcast schedule")
{
    const auto s = nowcast_schedule({2020, 1});
    REQUIRE(s.size() == 4);
    CHECK(s[0].step == 4);
    CHECK(s[0].release_month == YearMonth{2020, 1});
    CHECK(s[0].timing == "late");
    CHECK(s[0].related_through == YearMonth{2019, 12});
    CHECK(s[1].release_month == YearMonth{2020, 2});
    CHECK(s[1].timing == "early");
    CHECK(s[2].release_month == YearMonth{2020, 3});
    CHECK(s[3].step == 1);
    CHECK(s[3].release_month == YearMonth{2020, 4});
    CHECK(s[3].related_through == YearMonth{2020, 3});
    for (const auto& x : s) CHECK(x.gdp_through == Quarter{2019, 4});
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1].release_month < s[i].release_month);
}

TEST_CASE("truncation to a step's information set")
{
    Vintage v = make_vintage("2020-07-30", {2015, 1}, 22, {2015, 1}, 66);
    const ObservationPanel full = align_panel(v, build_spec("DV"));
    const Quarter target{2020, 1};
    ObservationPanel prev;
    for (int step = 4; step >= 1; --step) {
        const ObservationPanel p = truncate_to_step(full, target, step);
        CHECK(p.months.back() == YearMonth{2020, 3});
        const long last_rel = p.index_of(YearMonth{2020, 3}.plus(-(step - 1)));
        CHECK(p.observed(1, static_cast<std::size_t>(last_rel)));
        for (std::size_t t = static_cast<std::size_t>(last_rel) + 1; t < p.size(); ++t) CHECK_FALSE(p.observed(1, t));
        CHECK_FALSE(p.observed(0, p.size() - 1));
        CHECK(p.observed(0, p.size() - 4));
        if (step < 4) {
            for (std::size_t t = 0; t < prev.size(); ++t)
                for (int s = 0; s < 2; ++s)
                    if (prev.observed(s, t)) CHECK(p.observed(s, t));
        }
        prev = p;
    }
    CHECK_THROWS_AS(truncate_to_step(full, target, 0), std::invalid_argument);
    CHECK_THROWS_AS(truncate_to_step(full, {1990, 1}, 1), std::invalid_argument);
}

TEST_CASE("fetching from a directory")
{
    TempDir dir("data_fetch");
    write_vintage(dir.path, make_vintage("2020-01-28", {2015, 1}, 20, {2015, 1}, 60));
    write_vintage(dir.path, make_vintage("2020-02-05", {2015, 1}, 20, {2015, 1}, 61));
    auto r = fetch_vintages("file://" + dir.path.string(), "2020-01-01", "2020-12-31");
    CHECK(r.vintages.size() == 2);
    CHECK(r.errors.empty());
    CHECK(r.vintages[0].as_of == "2020-01-28");

    write_text(dir / "2020-03-05/gdp.csv", "date,value\n2015-Q1,100\n2015-Q2,x\n");
    write_text(dir / "2020-03-05/related.csv", "date,value\n2015-01,100\n");
    r = fetch_vintages(dir.path.string(), "2020-01-01", "2020-12-31");
    CHECK(r.vintages.size() == 2);
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].as_of == "2020-03-05");
    CHECK(r.errors[0].message.find("row 3") != std::string::npos);

    CHECK(fetch_vintages(dir.path.string(), "2021-01-01", "2021-12-31").vintages.empty());
    CHECK(fetch_vintages(dir.path.string(), "2020-12-31", "2020-01-01").vintages.empty());
    CHECK(fetch_vintages(dir.path.string(), "2020-02-01", "2020-02-28").vintages.size() == 1);
    const auto missing = fetch_vintages((dir / "nowhere").string(), "2020-01-01", "2020-12-31");
    CHECK(missing.vintages.empty());
    CHECK(missing.errors.size() == 1);
}

TEST_CASE("fetching over HTTP")
{
    TempDir dir("data_http");
    write_vintage(dir.path, make_vintage("2020-01-28", {2015, 1}, 20, {2015, 1}, 60));
    write_vintage(dir.path, make_vintage("2020-02-05", {2015, 1}, 20, {2015, 1}, 61));
    write_text(dir / "vintages.txt", "2020-01-28\n2020-02-05\n2020-03-05\n");
    httplib::Server server;
    server.set_mount_point("/data", dir.path.string());
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const auto r = fetch_vintages("http://127.0.0.1:" + std::to_string(port) + "/data", "2020-01-01", "2020-12-31");
    server.stop();
    worker.join();
    CHECK(r.vintages.size() == 2);
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].as_of == "2020-03-05");
    const Vintage local = load_vintage(dir / "2020-02-05");
    CHECK(r.vintages[1].related.values == local.related.values);
}

TEST_CASE("calendar-quarter growth and the correlation diagnostic")
{
    MonthlySeries m;
    m.start = {2019, 2};
    m.values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const QuarterlySeries q = calendar_quarter_growth(m);
    // Complete quarters: Q2 (values 3,4,5) and Q3 (6,7,8); growth is reported for Q3.
    CHECK(q.start == Quarter{2019, 3});
    REQUIRE(q.values.size() == 1);
    CHECK(q.values[0] == doctest::Approx(std::log((6.0 + 7 + 8) / (3.0 + 4 + 5))));

    // Related levels flat within each quarter at the GDP level: quarterly
    // growth of the sums equals GDP growth exactly.
    Vintage v = make_vintage("2021-01-01", {2010, 1}, 40, {2010, 1}, 0, 5);
    for (double level : v.gdp.values)
        for (int k = 0; k < 3; ++k) v.related.values.push_back(level);
    const auto d = correlation_diagnostic(v);
    CHECK(d.quarters == 39);
    CHECK(d.correlation == doctest::Approx(1.0));
    CHECK(d.in_band);
    const auto noise = correlation_diagnostic(make_vintage("2021-01-01", {2010, 1}, 40, {2010, 1}, 120, 3));
    CHECK_FALSE(noise.in_band);
}

TEST_CASE("calendar helpers")
{
    CHECK(YearMonth::parse("2020-03").str() == "2020-03");
    CHECK(Quarter::parse("2020-Q3").str() == "2020-Q3");
    CHECK_THROWS_AS(YearMonth::parse("2020-13"), std::invalid_argument);
    CHECK_THROWS_AS(Quarter::parse("2020-Q5"), std::invalid_argument);
    CHECK(YearMonth{2019, 12}.plus(1) == YearMonth{2020, 1});
    CHECK(Quarter::of({2020, 5}) == Quarter{2020, 2});
    CHECK(Quarter{2020, 1}.plus(-1) == Quarter{2019, 4});
}
