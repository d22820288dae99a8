// skewnow command-line driver. Links only the C interface.

#include "skewnow/skewnow.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(skn_status s, const std::string& what)
{
    if (s != SKN_OK) throw RuntimeFailure(what + ": " + skn_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};

using Spec = std::unique_ptr<skn_spec, Deleter<skn_spec, skn_spec_free>>;
using Vintage = std::unique_ptr<skn_vintage, Deleter<skn_vintage, skn_vintage_free>>;
using VintageSet = std::unique_ptr<skn_vintage_set, Deleter<skn_vintage_set, skn_vintage_set_free>>;
using Panel = std::unique_ptr<skn_panel, Deleter<skn_panel, skn_panel_free>>;
using Fit = std::unique_ptr<skn_fit, Deleter<skn_fit, skn_fit_free>>;
using Nowcast = std::unique_ptr<skn_nowcast, Deleter<skn_nowcast, skn_nowcast_free>>;
using Report = std::unique_ptr<skn_report, Deleter<skn_report, skn_report_free>>;

std::string take_string(char* s)
{
    std::string out = s ? s : "";
    skn_string_free(s);
    return out;
}

std::string num(double v)
{
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

Spec make_spec(const std::string& label)
{
    skn_spec* s = nullptr;
    if (skn_spec_build(label.c_str(), &s) == SKN_ERR_INVALID_ARGUMENT) throw UsageFailure(skn_last_error());
    check(s ? SKN_OK : SKN_ERR_RUNTIME, "model " + label);
    return Spec(s);
}

Vintage load_vintage(const std::string& dir)
{
    skn_vintage* v = nullptr;
    check(skn_vintage_load(dir.c_str(), &v), "loading " + dir);
    return Vintage(v);
}

Panel align(const skn_vintage* v, const skn_spec* spec)
{
    skn_panel* p = nullptr;
    check(skn_panel_align(v, spec, &p), "aligning panel");
    return Panel(p);
}

Fit read_fit(const std::string& path)
{
    skn_fit* f = nullptr;
    check(skn_fit_read_json(path.c_str(), &f), "reading fit");
    return Fit(f);
}

Spec fit_spec(const skn_fit* fit)
{
    skn_spec* s = nullptr;
    check(skn_fit_spec(fit, &s), "fit specification");
    return Spec(s);
}

skn_copula_family copula_family(const std::string& name)
{
    if (name == "independence") return SKN_COPULA_INDEPENDENCE;
    if (name == "gaussian") return SKN_COPULA_GAUSSIAN;
    if (name == "student_t") return SKN_COPULA_STUDENT_T;
    throw UsageFailure("unknown copula family: " + name);
}

std::string out_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RuntimeFailure("cannot create " + dir + ": " + ec.message());
}

void require_path(const std::string& path, const char* flag)
{
    if (!fs::exists(path)) throw UsageFailure(std::string(flag) + ": no such path: " + path);
}

// Flat key=value file; '#' starts a comment; repeated keys accumulate.
std::multimap<std::string, std::string> read_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageFailure("cannot read config file " + path);
    std::multimap<std::string, std::string> out;
    std::string line;
    int n = 0;
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    while (std::getline(in, line)) {
        ++n;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageFailure(path + ":" + std::to_string(n) + ": expected key=value");
        out.emplace(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

struct Options {
    std::string config;

    std::vector<std::string> models{"DVS_t"};
    bool model_given = false;
    std::string data;
    std::string endpoint;
    std::string from = "0000-01-01";
    std::string to = "9999-12-31";
    std::string out = ".";
    std::string fit;
    std::string truth;
    std::string input;
    std::string kind;
    std::string quarter;
    int step = 1;

    double weight = 1.0 / 3.0;
    std::string copula = "student_t";
    size_t starts = 5;
    size_t max_iterations = 2000;
    double tolerance = 1e-8;
    uint64_t seed = 1;
    size_t draws = 10000;
    bool warm_start = false;
    std::vector<std::string> regimes;

    size_t length = 600;
    std::string start_month = "1970-01";
    std::string as_of;
    std::string pseudo_quarters;
};

skn_estimation_options estimation_options(const Options& o)
{
    if (!(o.weight > 0.0 && o.weight <= 1.0)) throw UsageFailure("--weight must lie in (0,1]");
    skn_estimation_options e;
    skn_estimation_options_default(&e);
    e.starts = o.starts;
    e.max_iterations = o.max_iterations;
    e.relative_tolerance = o.tolerance;
    e.weight = o.weight;
    e.copula = copula_family(o.copula);
    e.seed = o.seed;
    return e;
}

Panel information_set(const skn_panel* full, const Options& o)
{
    skn_panel* p = nullptr;
    check(skn_panel_truncate(full, o.quarter.c_str(), o.step, &p), "information set");
    return Panel(p);
}

int cmd_ingest(const Options& o)
{
    skn_vintage_set* raw = nullptr;
    check(skn_vintages_fetch(o.endpoint.c_str(), o.from.c_str(), o.to.c_str(), &raw), "fetching vintages");
    VintageSet set(raw);
    ensure_dir(o.out);
    std::ofstream diag(out_path(o.out, "ingest.csv"));
    diag << "as_of,correlation,quarters,in_band\n";
    for (size_t i = 0; i < skn_vintage_set_size(set.get()); ++i) {
        const skn_vintage* v = skn_vintage_set_get(set.get(), i);
        check(skn_vintage_write(v, o.out.c_str()), "writing vintage");
        char* as_of = nullptr;
        check(skn_vintage_as_of(v, &as_of), "vintage date");
        double corr = NAN;
        size_t quarters = 0;
        int in_band = 0;
        check(skn_vintage_correlation(v, &corr, &quarters, &in_band), "correlation diagnostic");
        diag << take_string(as_of) << ',' << num(corr) << ',' << quarters << ',' << in_band << '\n';
    }
    for (size_t i = 0; i < skn_vintage_set_error_count(set.get()); ++i) {
        char* as_of = nullptr;
        char* message = nullptr;
        check(skn_vintage_set_error(set.get(), i, &as_of, &message), "fetch error");
        std::cerr << "skipped " << take_string(as_of) << ": " << take_string(message) << '\n';
    }
    std::cout << "ingested " << skn_vintage_set_size(set.get()) << " vintages, "
              << skn_vintage_set_error_count(set.get()) << " failed\n";
    return skn_vintage_set_size(set.get()) > 0 ? 0 : kExitRuntime;
}

std::map<std::string, double> fit_parameters(const skn_fit* fit)
{
    std::map<std::string, double> out;
    for (size_t i = 0; i < skn_fit_parameter_count(fit); ++i) {
        char* name = nullptr;
        double v = NAN;
        check(skn_fit_parameter(fit, i, &name, &v), "fit parameter");
        out[take_string(name)] = v;
    }
    return out;
}

// parameter,true,estimate,relative_error for the parameters both fits share.
void write_recovery(const std::string& path, const skn_fit* truth, const skn_fit* fit)
{
    const auto t = fit_parameters(truth);
    std::ofstream out(path);
    out << "parameter,true,estimate,relative_error\n";
    for (const auto& [name, est] : fit_parameters(fit)) {
        const auto it = t.find(name);
        if (it == t.end()) continue;
        const double rel = it->second != 0.0 ? std::abs(est - it->second) / std::abs(it->second) : NAN;
        out << name << ',' << num(it->second) << ',' << num(est) << ',' << num(rel) << '\n';
    }
}

int cmd_estimate(const Options& o)
{
    require_path(o.data, "--data");
    const auto est = estimation_options(o);
    for (const auto& label : o.models) make_spec(label);
    const Vintage vintage = load_vintage(o.data);
    Fit truth;
    if (!o.truth.empty()) {
        require_path(o.truth, "--truth");
        truth = read_fit(o.truth);
    }
    ensure_dir(o.out);
    std::ofstream table(out_path(o.out, "fit_summary.csv"));
    table << "model,log_lik,log_lik_indep,log_lik_gdp,dependence,copula_dof,aic,bic,n_params,n_obs,converged\n";
    for (const auto& label : o.models) {
        const Spec spec = make_spec(label);
        const Panel panel = align(vintage.get(), spec.get());
        skn_fit* raw = nullptr;
        check(skn_estimate(panel.get(), spec.get(), &est, nullptr, &raw), "estimating " + label);
        const Fit fit(raw);
        check(skn_fit_write_json(fit.get(), out_path(o.out, "fit_" + label + ".json").c_str()), "writing fit");
        if (truth) write_recovery(out_path(o.out, "recovery_" + label + ".csv"), truth.get(), fit.get());
        skn_fit_summary s;
        check(skn_fit_summary_get(fit.get(), &s), "fit summary");
        table << label << ',' << num(s.log_lik) << ',' << num(s.log_lik_indep) << ',' << num(s.log_lik_gdp) << ','
              << num(s.dependence) << ',' << num(s.copula_dof) << ',' << num(s.aic) << ',' << num(s.bic) << ','
              << s.n_params << ',' << s.n_obs << ',' << s.converged << '\n';
        std::cout << label << ": log_lik " << num(s.log_lik) << ", aic " << num(s.aic) << ", bic " << num(s.bic)
                  << (s.converged ? "" : " (not converged)") << '\n';
    }
    return 0;
}

int cmd_filter(const Options& o)
{
    require_path(o.fit, "--fit");
    require_path(o.data, "--data");
    const Fit fit = read_fit(o.fit);
    const Spec spec = fit_spec(fit.get());
    const Vintage vintage = load_vintage(o.data);
    const Panel panel = align(vintage.get(), spec.get());
    ensure_dir(o.out);
    double ll = NAN;
    check(skn_filter_write(fit.get(), panel.get(), out_path(o.out, "states.csv").c_str(),
                           out_path(o.out, "params.csv").c_str(), out_path(o.out, "scores.csv").c_str(), &ll),
          "filtering");
    std::cout << "log_lik " << num(ll) << '\n';
    return 0;
}

Nowcast run_nowcast(const Options& o)
{
    require_path(o.fit, "--fit");
    require_path(o.data, "--data");
    if (o.quarter.empty()) throw UsageFailure("--quarter is required");
    const Fit fit = read_fit(o.fit);
    const Spec spec = fit_spec(fit.get());
    const Vintage vintage = load_vintage(o.data);
    const Panel full = align(vintage.get(), spec.get());
    const Panel panel = information_set(full.get(), o);
    skn_nowcast* raw = nullptr;
    check(skn_nowcast_run(fit.get(), panel.get(), o.quarter.c_str(), o.step, o.draws, o.seed, &raw), "nowcasting");
    return Nowcast(raw);
}

int cmd_nowcast(const Options& o)
{
    const Nowcast d = run_nowcast(o);
    ensure_dir(o.out);
    check(skn_nowcast_write(d.get(), out_path(o.out, "density.csv").c_str(), out_path(o.out, "nowcast.json").c_str()),
          "writing nowcast");
    double mean = NAN, lo = NAN, hi = NAN;
    check(skn_nowcast_mean(d.get(), &mean), "mean");
    check(skn_nowcast_interval(d.get(), 0.9, &lo, &hi), "interval");
    std::cout << o.quarter << " step " << o.step << ": mean " << num(mean) << ", 90% [" << num(lo) << ", " << num(hi)
              << "]\n";
    return 0;
}

int cmd_backtest(const Options& o)
{
    std::vector<Spec> specs;
    std::vector<const skn_spec*> ptrs;
    for (const auto& label : o.models) {
        specs.push_back(make_spec(label));
        ptrs.push_back(specs.back().get());
    }
    skn_vintage_set* raw = nullptr;
    check(skn_vintages_fetch(o.endpoint.c_str(), o.from.c_str(), o.to.c_str(), &raw), "fetching vintages");
    const VintageSet set(raw);
    if (skn_vintage_set_size(set.get()) == 0) throw RuntimeFailure("no vintages found at " + o.endpoint);
    std::string regimes;
    for (const auto& r : o.regimes) regimes += (regimes.empty() ? "" : ";") + r;
    skn_backtest_options bo;
    skn_backtest_options_default(&bo);
    bo.estimation = estimation_options(o);
    bo.n_draws = o.draws;
    bo.warm_start = o.warm_start ? 1 : 0;
    bo.regimes = regimes.empty() ? nullptr : regimes.c_str();
    skn_report* rep = nullptr;
    check(skn_backtest(set.get(), ptrs.data(), ptrs.size(), &bo, o.seed, &rep), "backtest");
    const Report report(rep);
    ensure_dir(o.out);
    check(skn_report_write(report.get(), out_path(o.out, "backtest.csv").c_str(),
                           out_path(o.out, "backtest.json").c_str()),
          "writing backtest");
    std::cout << skn_report_entry_count(report.get()) << " nowcasts scored, "
              << skn_report_failure_count(report.get()) << " failures\n";
    return 0;
}

int cmd_simulate(const Options& o)
{
    if (o.models.size() != 1) throw UsageFailure("simulate takes a single --model");
    Fit source;
    if (!o.fit.empty()) {
        require_path(o.fit, "--fit");
        source = read_fit(o.fit);
    } else {
        const Spec spec = make_spec(o.models.front());
        skn_fit* raw = nullptr;
        check(skn_fit_reference(spec.get(), &raw), "reference parameters");
        source.reset(raw);
    }
    skn_panel* raw = nullptr;
    check(skn_simulate(source.get(), o.length, o.seed, o.start_month.c_str(), &raw), "simulating");
    const Panel panel(raw);
    std::string as_of = o.as_of;
    if (as_of.empty()) {
        char* month = nullptr;
        check(skn_panel_month(panel.get(), skn_panel_size(panel.get()) - 1, &month), "panel month");
        as_of = take_string(month) + "-28";
    }
    ensure_dir(o.out);
    skn_vintage* v = nullptr;
    check(skn_panel_to_vintage(panel.get(), as_of.c_str(), &v), "building vintage");
    const Vintage vintage(v);
    const std::string vintage_root = out_path(o.out, "vintage");
    check(skn_vintage_write(vintage.get(), vintage_root.c_str()), "writing vintage");
    check(skn_panel_write_csv(panel.get(), out_path(o.out, "panel.csv").c_str()), "writing panel");
    check(skn_fit_write_json(source.get(), out_path(o.out, "truth.json").c_str()), "writing truth");
    size_t written = 0;
    if (!o.pseudo_quarters.empty()) {
        check(skn_write_pseudo_vintages(panel.get(), o.pseudo_quarters.c_str(), out_path(o.out, "pseudo").c_str(),
                                        &written),
              "pseudo vintages");
    }
    std::cout << "simulated " << skn_panel_size(panel.get()) << " months into "
              << (fs::path(vintage_root) / as_of).string();
    if (written) std::cout << ", " << written << " pseudo vintages";
    std::cout << '\n';
    return 0;
}

int cmd_plot(const Options& o)
{
    ensure_dir(o.out);
    if (o.kind == "fan_chart") {
        require_path(o.input, "--input");
        skn_report* raw = nullptr;
        check(skn_report_read_csv(o.input.c_str(), &raw), "reading backtest");
        const Report report(raw);
        const char* model = o.model_given ? o.models.front().c_str() : nullptr;
        check(skn_report_write_fan_chart(report.get(), model, out_path(o.out, "fan_chart.csv").c_str()), "fan chart");
    } else if (o.kind == "density") {
        const Nowcast d = run_nowcast(o);
        check(skn_nowcast_write(d.get(), out_path(o.out, "density.csv").c_str(), nullptr), "density");
    } else if (o.kind == "states" || o.kind == "scores") {
        require_path(o.fit, "--fit");
        require_path(o.data, "--data");
        const Fit fit = read_fit(o.fit);
        const Spec spec = fit_spec(fit.get());
        const Vintage vintage = load_vintage(o.data);
        const Panel panel = align(vintage.get(), spec.get());
        const std::string path = out_path(o.out, o.kind + ".csv");
        const bool states = o.kind == "states";
        check(skn_filter_write(fit.get(), panel.get(), states ? path.c_str() : nullptr, nullptr,
                               states ? nullptr : path.c_str(), nullptr),
              "filtering");
    } else {
        throw UsageFailure("unknown plot kind: " + o.kind);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Density nowcasts of GDP growth from a monthly indicator"};
    app.require_subcommand(1);
    Options o;

    const auto add_model = [&](CLI::App* c, bool many) {
        c->add_option("--model", o.models,
                      many ? "Model labels (DVS_t, DVS, DV_t, DV, t, benchmark), repeatable or comma separated"
                           : "Model label (DVS_t, DVS, DV_t, DV, t, benchmark)")
            ->delimiter(',')
            ->capture_default_str();
    };
    const auto add_estimation = [&](CLI::App* c) {
        c->add_option("--weight", o.weight, "Weight W on the indicator log density, in (0,1]")->capture_default_str();
        c->add_option("--copula", o.copula, "Copula family: independence, gaussian, student_t")->capture_default_str();
        c->add_option("--starts", o.starts, "Optimizer starting points")->capture_default_str();
        c->add_option("--max-iterations", o.max_iterations, "Optimizer iteration cap per start")->capture_default_str();
        c->add_option("--tolerance", o.tolerance, "Relative improvement tolerance")->capture_default_str();
    };
    const auto add_nowcast = [&](CLI::App* c) {
        c->add_option("--fit", o.fit, "Fit JSON from estimate");
        c->add_option("--data", o.data, "Vintage directory holding gdp.csv and related.csv");
        c->add_option("--quarter", o.quarter, "Target quarter, YYYY-Qn");
        c->add_option("--step", o.step, "Nowcast step 1..4")->check(CLI::Range(1, 4))->capture_default_str();
        c->add_option("--draws", o.draws, "Simulation draws")->capture_default_str();
    };
    const auto add_common = [&](CLI::App* c) {
        c->add_option("--config", o.config, "Key-value configuration file; flags override its values");
        c->add_option("--out", o.out, "Output directory")->capture_default_str();
        c->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    };
    const auto add_endpoint = [&](CLI::App* c) {
        c->add_option("--endpoint", o.endpoint, "Vintage root: directory, file:// or http:// URL")->required();
        c->add_option("--from", o.from, "Earliest vintage date, YYYY-MM-DD")->capture_default_str();
        c->add_option("--to", o.to, "Latest vintage date, YYYY-MM-DD")->capture_default_str();
    };

    auto* ingest = app.add_subcommand("ingest", "Fetch vintages and write them under --out with diagnostics");
    add_common(ingest);
    add_endpoint(ingest);

    auto* est = app.add_subcommand("estimate", "Fit models to one vintage");
    add_common(est);
    add_model(est, true);
    est->add_option("--data", o.data, "Vintage directory holding gdp.csv and related.csv");
    add_estimation(est);
    est->add_option("--truth", o.truth, "Simulation truth JSON; adds a parameter recovery table per model");

    auto* filt = app.add_subcommand("filter", "Write filtered state, parameter and score paths");
    add_common(filt);
    filt->add_option("--fit", o.fit, "Fit JSON from estimate");
    filt->add_option("--data", o.data, "Vintage directory holding gdp.csv and related.csv");

    auto* now = app.add_subcommand("nowcast", "Density nowcast for one quarter and step");
    add_common(now);
    add_nowcast(now);

    auto* bt = app.add_subcommand("backtest", "Pseudo real-time evaluation over a range of vintages");
    add_common(bt);
    add_model(bt, true);
    add_endpoint(bt);
    add_estimation(bt);
    bt->add_option("--draws", o.draws, "Simulation draws per nowcast")->capture_default_str();
    bt->add_flag("--warm-start", o.warm_start, "Start each re-estimation from the previous vintage's fit");
    bt->add_option("--regime", o.regimes, "Named quarter list, name=YYYY-Qn,YYYY-Qn (repeatable)");

    auto* sim = app.add_subcommand("simulate", "Simulate a synthetic panel and write it as a vintage");
    add_common(sim);
    add_model(sim, false);
    sim->add_option("--fit", o.fit, "Fit JSON whose parameters drive the simulation (default: reference parameters)");
    sim->add_option("--length", o.length, "Months to simulate")->capture_default_str();
    sim->add_option("--start", o.start_month, "First month, YYYY-MM")->capture_default_str();
    sim->add_option("--as-of", o.as_of, "Vintage date (default: day 28 of the last month)");
    sim->add_option("--pseudo-quarters", o.pseudo_quarters, "Quarters for pseudo vintages, YYYY-Qn,YYYY-Qn");

    auto* plot = app.add_subcommand("plot", "Emit long-format plot data");
    add_common(plot);
    plot->add_option("--kind", o.kind, "fan_chart, density, states or scores")->required();
    plot->add_option("--input", o.input, "Backtest CSV (fan_chart)");
    add_model(plot, false);
    add_nowcast(plot);

    try {
        app.parse(argc, argv);
        CLI::App* cmd = app.get_subcommands().front();
        if (!o.config.empty()) {
            // Config values fill only options not given on the command line.
            const auto config = read_config(o.config);
            for (auto it = config.begin(); it != config.end(); it = config.upper_bound(it->first)) {
                const std::string key = it->first;
                CLI::Option* opt = nullptr;
                try {
                    opt = cmd->get_option("--" + key);
                } catch (const CLI::OptionNotFound&) {
                    throw UsageFailure("unknown config key for " + cmd->get_name() + ": " + key);
                }
                if (key == "config" || opt->count() > 0) continue;
                const auto range = config.equal_range(key);
                for (auto r = range.first; r != range.second; ++r) {
                    if (opt->get_type_size() == 0) {
                        if (r->second == "true" || r->second == "1") opt->add_result("true");
                    } else {
                        opt->add_result(r->second);
                    }
                }
                opt->run_callback();
            }
            for (const auto* opt : cmd->get_options()) {
                if (opt->get_required() && opt->count() == 0) throw CLI::RequiredError(opt->get_name());
            }
        }
        if (cmd == plot) o.model_given = plot->get_option("--model")->count() > 0;
        const std::string name = cmd->get_name();
        if (name == "ingest") return cmd_ingest(o);
        if (name == "estimate") return cmd_estimate(o);
        if (name == "filter") return cmd_filter(o);
        if (name == "nowcast") return cmd_nowcast(o);
        if (name == "backtest") return cmd_backtest(o);
        if (name == "simulate") return cmd_simulate(o);
        return cmd_plot(o);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const UsageFailure& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
