#include "evaluation.hpp"

#include "format.hpp"
#include "rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace skewnow {

namespace fs = std::filesystem;

namespace {

double round9(double v) { return std::isfinite(v) ? std::stod(format_number(v)) : v; }

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

double log_score(const DensityNowcast& d, double realized)
{
    const double floor = std::log(kDensityFloor);
    const auto& x = d.grid.x;
    const auto& f = d.grid.density;
    if (!std::isfinite(realized) || x.size() < 2 || realized < x.front() || realized > x.back()) return floor;
    const auto it = std::upper_bound(x.begin(), x.end(), realized);
    const std::size_t k = it == x.end() ? x.size() - 1 : static_cast<std::size_t>(it - x.begin());
    const std::size_t j = k - 1;
    const double w = (realized - x[j]) / (x[k] - x[j]);
    const double dens = (1.0 - w) * f[j] + w * f[k];
    return std::max(std::log(std::max(dens, 0.0)), floor);
}

double mae(const std::vector<double>& points, const std::vector<double>& realized)
{
    if (points.size() != realized.size()) throw std::invalid_argument("mae: length mismatch");
    if (points.empty()) throw std::invalid_argument("mae: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += std::abs(points[i] - realized[i]);
    return s / static_cast<double>(points.size());
}

VintageTarget vintage_target(const Vintage& v)
{
    VintageTarget t;
    t.quarter = v.gdp.end().plus(1);
    const int covered = v.related.end().ordinal() - t.quarter.first_month().ordinal() + 1;
    t.step = 4 - std::clamp(covered, 0, 3);
    return t;
}

std::optional<double> first_release(const std::vector<Vintage>& vintages, std::size_t after, Quarter q)
{
    for (std::size_t j = after + 1; j < vintages.size(); ++j) {
        const QuarterlySeries& g = vintages[j].gdp;
        const int k = q.ordinal() - g.start.ordinal();
        if (k >= 1 && k < static_cast<int>(g.values.size())) {
            return std::log(g.values[static_cast<std::size_t>(k)]) - std::log(g.values[static_cast<std::size_t>(k - 1)]);
        }
    }
    return std::nullopt;
}

std::vector<BacktestAggregate> aggregate(const std::vector<BacktestEntry>& entries,
                                         const std::map<std::string, std::vector<Quarter>>& regimes)
{
    std::vector<std::string> models;
    for (const auto& e : entries)
        if (std::find(models.begin(), models.end(), e.model) == models.end()) models.push_back(e.model);

    std::vector<BacktestAggregate> out;
    const auto add = [&](const std::string& model, const std::string& regime, int step, auto in_regime) {
        BacktestAggregate a;
        a.model = model;
        a.regime = regime;
        a.step = step;
        for (const auto& e : entries) {
            if (e.model != model || e.step != step || !in_regime(e.quarter)) continue;
            ++a.count;
            a.mean_log_score += e.log_score;
            a.mae += e.abs_error;
        }
        if (a.count == 0) return;
        a.mean_log_score /= static_cast<double>(a.count);
        a.mae /= static_cast<double>(a.count);
        out.push_back(a);
    };
    for (const auto& m : models) {
        for (int step = 4; step >= 1; --step) {
            add(m, "all", step, [](Quarter) { return true; });
            for (const auto& [name, quarters] : regimes) {
                add(m, name, step, [&](Quarter q) { return std::find(quarters.begin(), quarters.end(), q) != quarters.end(); });
            }
        }
    }
    return out;
}

BacktestReport backtest(const std::vector<Vintage>& vintages, const std::vector<ModelSpec>& specs,
                        const BacktestConfig& config, std::uint64_t seed)
{
    if (vintages.size() < 2) throw std::invalid_argument("backtest needs at least two vintages");
    if (specs.empty()) throw std::invalid_argument("backtest needs at least one model");
    std::vector<Vintage> sorted = vintages;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Vintage& a, const Vintage& b) { return a.as_of < b.as_of; });

    BacktestReport report;
    for (std::size_t m = 0; m < specs.size(); ++m) {
        const ModelSpec& spec = specs[m];
        std::optional<ModelParameters> previous;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            const Vintage& v = sorted[i];
            const VintageTarget target = vintage_target(v);
            const auto realized = first_release(sorted, i, target.quarter);
            if (!realized) continue;
            try {
                const ObservationPanel full = align_panel(v, spec);
                EstimationConfig ec = config.estimation;
                ec.seed = splitmix64(config.estimation.seed ^ splitmix64(m * 1000003ULL + i));
                if (config.warm_start && previous) ec.warm_start = previous;
                const FitResult fit = estimate(full, spec, ec);
                previous = fit.estimate;
                const ObservationPanel info = truncate_to_step(full, target.quarter, target.step);
                const std::uint64_t cell_seed = splitmix64(seed ^ splitmix64(m * 1000003ULL + i + 0x9e37ULL));
                const DensityNowcast d =
                    density_nowcast(fit, info, target.quarter, target.step, config.n_draws, cell_seed);
                BacktestEntry e;
                e.model = spec.label;
                e.as_of = v.as_of;
                e.quarter = target.quarter;
                e.step = target.step;
                e.realized = *realized;
                e.mean = point_nowcast(d);
                e.log_score = log_score(d, *realized);
                e.abs_error = std::abs(e.mean - *realized);
                const PercentileBand band = interval(d, 0.9);
                e.lo90 = band.lo;
                e.hi90 = band.hi;
                // A later vintage with the same information set replaces an earlier one.
                const auto same = std::find_if(report.entries.begin(), report.entries.end(), [&](const BacktestEntry& x) {
                    return x.model == e.model && x.quarter == e.quarter && x.step == e.step;
                });
                if (same != report.entries.end()) {
                    *same = e;
                } else {
                    report.entries.push_back(e);
                }
            } catch (const std::exception& ex) {
                report.failures.push_back({spec.label, v.as_of, ex.what()});
            }
            if (config.progress) config.progress(spec.label + " " + v.as_of);
        }
    }
    report.aggregates = aggregate(report.entries, config.regimes);
    return report;
}

void write_backtest_csv(const fs::path& path, const BacktestReport& report)
{
    auto out = open_output(path);
    out << "model,quarter,step,metric,value\n";
    for (const auto& e : report.entries) {
        const std::pair<const char*, double> metrics[] = {{"log_score", e.log_score}, {"abs_error", e.abs_error},
                                                          {"mean", e.mean},           {"lo90", e.lo90},
                                                          {"hi90", e.hi90},           {"realized", e.realized}};
        for (const auto& [name, value] : metrics) {
            out << e.model << ',' << e.quarter.str() << ',' << e.step << ',' << name << ',' << format_number(value)
                << '\n';
        }
    }
}

void write_backtest_json(const fs::path& path, const BacktestReport& report)
{
    nlohmann::ordered_json j;
    j["entries"] = report.entries.size();
    j["aggregates"] = nlohmann::ordered_json::array();
    for (const auto& a : report.aggregates) {
        j["aggregates"].push_back({{"model", a.model},
                                   {"regime", a.regime},
                                   {"step", a.step},
                                   {"count", a.count},
                                   {"mean_log_score", round9(a.mean_log_score)},
                                   {"mae", round9(a.mae)}});
    }
    j["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : report.failures) {
        j["failures"].push_back({{"model", f.model}, {"as_of", f.as_of}, {"message", f.message}});
    }
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

std::vector<BacktestEntry> read_backtest_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "model,quarter,step,metric,value") throw std::runtime_error(path.string() + ": not a backtest report");
    std::vector<BacktestEntry> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 5) throw std::runtime_error(path.string() + ": row " + std::to_string(row) + ": expected 5 fields");
        const Quarter q = Quarter::parse(f[1]);
        const int step = std::stoi(f[2]);
        auto it = std::find_if(out.begin(), out.end(), [&](const BacktestEntry& e) {
            return e.model == f[0] && e.quarter == q && e.step == step;
        });
        if (it == out.end()) {
            BacktestEntry e;
            e.model = f[0];
            e.quarter = q;
            e.step = step;
            out.push_back(e);
            it = out.end() - 1;
        }
        const double v = std::stod(f[4]);
        if (f[3] == "log_score") it->log_score = v;
        else if (f[3] == "abs_error") it->abs_error = v;
        else if (f[3] == "mean") it->mean = v;
        else if (f[3] == "lo90") it->lo90 = v;
        else if (f[3] == "hi90") it->hi90 = v;
        else if (f[3] == "realized") it->realized = v;
    }
    return out;
}

}  // namespace skewnow
