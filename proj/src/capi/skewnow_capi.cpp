#include "skewnow/skewnow.h"

#include "data.hpp"
#include "evaluation.hpp"
#include "io.hpp"
#include "nowcast.hpp"
#include "synthetic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>

using namespace skewnow;

struct skn_spec {
    ModelSpec value;
};
struct skn_vintage {
    Vintage value;
};
struct skn_vintage_set {
    std::vector<skn_vintage> vintages;
    std::vector<FetchError> errors;
};
struct skn_panel {
    ObservationPanel value;
};
struct skn_fit {
    FitResult value;
};
struct skn_nowcast {
    DensityNowcast value;
};
struct skn_report {
    BacktestReport value;
};

namespace {

thread_local std::string g_last_error;

skn_status fail(skn_status s, const std::string& msg)
{
    g_last_error = msg;
    return s;
}

template <typename F>
skn_status guarded(F&& f)
{
    try {
        f();
        g_last_error.clear();
        return SKN_OK;
    } catch (const ParseError& e) {
        return fail(SKN_ERR_PARSE, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(SKN_ERR_IO, e.what());
    } catch (const std::domain_error& e) {
        return fail(SKN_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SKN_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(SKN_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(SKN_ERR_RUNTIME, e.what());
    } catch (...) {
        return fail(SKN_ERR_RUNTIME, "unknown error");
    }
}

void require(bool ok, const char* what)
{
    if (!ok) throw std::invalid_argument(what);
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

Tail tail_of(double nu) { return std::isinf(nu) && nu > 0 ? Tail::infinite() : Tail(nu); }

ASTParams ast_of(const skn_ast_params* p)
{
    require(p != nullptr, "null AST parameters");
    ASTParams a{p->location, p->scale, p->shape, tail_of(p->tail_left), tail_of(p->tail_right)};
    a.validate();
    return a;
}

CopulaFamily copula_of(skn_copula_family f)
{
    switch (f) {
    case SKN_COPULA_INDEPENDENCE: return CopulaFamily::independence;
    case SKN_COPULA_GAUSSIAN: return CopulaFamily::gaussian;
    case SKN_COPULA_STUDENT_T: return CopulaFamily::student_t;
    }
    throw std::invalid_argument("unknown copula family");
}

EstimationConfig estimation_of(const skn_estimation_options* o)
{
    EstimationConfig c;
    if (!o) return c;
    c.starts = o->starts;
    c.max_iterations = o->max_iterations;
    c.relative_tolerance = o->relative_tolerance;
    c.weight = o->weight;
    c.copula = copula_of(o->copula);
    c.seed = o->seed;
    return c;
}

std::vector<Quarter> parse_quarters(const std::string& list)
{
    std::vector<Quarter> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto b = item.find_first_not_of(' ');
        if (b == std::string::npos) continue;
        out.push_back(Quarter::parse(item.substr(b, item.find_last_not_of(' ') - b + 1)));
    }
    return out;
}

std::map<std::string, std::vector<Quarter>> parse_regimes(const char* text)
{
    std::map<std::string, std::vector<Quarter>> out;
    if (!text) return out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ';');) {
        if (item.find_first_not_of(' ') == std::string::npos) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("regime entries look like name=YYYY-Qn,...");
        out[item.substr(0, eq)] = parse_quarters(item.substr(eq + 1));
    }
    return out;
}

}  // namespace

extern "C" {

const char* skn_last_error(void) { return g_last_error.c_str(); }

const char* skn_version(void) { return "0.1.0"; }

void skn_string_free(char* s) { std::free(s); }

skn_status skn_k_const(double nu, double* out)
{
    return guarded([&] {
        require(out, "null output");
        *out = k_const(tail_of(nu));
    });
}

skn_status skn_ast_logpdf(double y, const skn_ast_params* p, double* out)
{
    return guarded([&] {
        require(out, "null output");
        *out = ast_logpdf(y, ast_of(p));
    });
}

skn_status skn_ast_cdf(double y, const skn_ast_params* p, double* out)
{
    return guarded([&] {
        require(out, "null output");
        *out = ast_cdf(y, ast_of(p));
    });
}

skn_status skn_ast_quantile(double u, const skn_ast_params* p, double* out)
{
    return guarded([&] {
        require(out, "null output");
        *out = ast_quantile(u, ast_of(p));
    });
}

skn_status skn_ast_mean(const skn_ast_params* p, double* out)
{
    return guarded([&] {
        require(out, "null output");
        *out = ast_mean(ast_of(p));
    });
}

skn_status skn_ast_score(double y, const skn_ast_params* p, double out[3])
{
    return guarded([&] {
        require(out, "null output");
        const ASTScore s = ast_score(y, ast_of(p));
        out[0] = s.d_mu;
        out[1] = s.d_sigma;
        out[2] = s.d_alpha;
    });
}

skn_status skn_ast_fisher(const skn_ast_params* p, double out[3])
{
    return guarded([&] {
        require(out, "null output");
        const ASTInformation i = ast_fisher(ast_of(p));
        out[0] = i.i_mu;
        out[1] = i.i_sigma;
        out[2] = i.i_alpha;
    });
}

skn_status skn_ast_sample(const skn_ast_params* p, size_t n, uint64_t seed, double* out)
{
    return guarded([&] {
        require(out || n == 0, "null output");
        const auto draws = ast_sample(ast_of(p), n, seed);
        std::copy(draws.begin(), draws.end(), out);
    });
}

skn_status skn_copula_logdensity(double u1, double u2, skn_copula_family family, double dependence, double dof,
                                 double* out)
{
    return guarded([&] {
        require(out, "null output");
        CopulaSpec c{copula_of(family), dependence, dof};
        c.validate();
        *out = copula_logdensity(u1, u2, c);
    });
}

skn_status skn_information_criteria(double loglik, size_t p, size_t n, double* aic, double* bic)
{
    return guarded([&] {
        require(aic && bic, "null output");
        require(n >= 1, "n must be at least 1");
        const auto ic = information_criteria(loglik, p, n);
        *aic = ic.aic;
        *bic = ic.bic;
    });
}

skn_status skn_spec_build(const char* label, skn_spec** out)
{
    return guarded([&] {
        require(label && out, "null argument");
        *out = new skn_spec{build_spec(label)};
    });
}

skn_status skn_spec_from_json(const char* json, skn_spec** out)
{
    return guarded([&] {
        require(json && out, "null argument");
        try {
            *out = new skn_spec{spec_from_json(json)};
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("spec JSON: ") + e.what());
        }
    });
}

skn_status skn_spec_to_json(const skn_spec* spec, char** out)
{
    return guarded([&] {
        require(spec && out, "null argument");
        *out = dup_string(spec_to_json(spec->value));
    });
}

skn_status skn_spec_parameter_count(const skn_spec* spec, skn_copula_family copula, size_t* out)
{
    return guarded([&] {
        require(spec && out, "null argument");
        *out = count_parameters(spec->value, copula_of(copula));
    });
}

void skn_spec_free(skn_spec* spec) { delete spec; }

skn_status skn_vintage_load(const char* dir, skn_vintage** out)
{
    return guarded([&] {
        require(dir && out, "null argument");
        *out = new skn_vintage{load_vintage(dir)};
    });
}

skn_status skn_vintage_write(const skn_vintage* v, const char* root)
{
    return guarded([&] {
        require(v && root, "null argument");
        write_vintage(root, v->value);
    });
}

skn_status skn_vintage_as_of(const skn_vintage* v, char** out)
{
    return guarded([&] {
        require(v && out, "null argument");
        *out = dup_string(v->value.as_of);
    });
}

skn_status skn_vintage_correlation(const skn_vintage* v, double* correlation, size_t* quarters, int* in_band)
{
    return guarded([&] {
        require(v && correlation && quarters && in_band, "null argument");
        const CorrelationDiagnostic d = correlation_diagnostic(v->value);
        *correlation = d.correlation;
        *quarters = d.quarters;
        *in_band = d.in_band ? 1 : 0;
    });
}

void skn_vintage_free(skn_vintage* v) { delete v; }

skn_status skn_vintages_fetch(const char* endpoint, const char* from, const char* to, skn_vintage_set** out)
{
    return guarded([&] {
        require(endpoint && from && to && out, "null argument");
        FetchResult r = fetch_vintages(endpoint, from, to);
        auto set = std::make_unique<skn_vintage_set>();
        for (auto& v : r.vintages) set->vintages.push_back(skn_vintage{std::move(v)});
        set->errors = std::move(r.errors);
        *out = set.release();
    });
}

size_t skn_vintage_set_size(const skn_vintage_set* set) { return set ? set->vintages.size() : 0; }

const skn_vintage* skn_vintage_set_get(const skn_vintage_set* set, size_t i)
{
    return set && i < set->vintages.size() ? &set->vintages[i] : nullptr;
}

size_t skn_vintage_set_error_count(const skn_vintage_set* set) { return set ? set->errors.size() : 0; }

skn_status skn_vintage_set_error(const skn_vintage_set* set, size_t i, char** as_of, char** message)
{
    return guarded([&] {
        require(set && as_of && message, "null argument");
        require(i < set->errors.size(), "error index out of range");
        *as_of = dup_string(set->errors[i].as_of);
        *message = dup_string(set->errors[i].message);
    });
}

void skn_vintage_set_free(skn_vintage_set* set) { delete set; }

skn_status skn_panel_align(const skn_vintage* v, const skn_spec* spec, skn_panel** out)
{
    return guarded([&] {
        require(v && spec && out, "null argument");
        *out = new skn_panel{align_panel(v->value, spec->value)};
    });
}

skn_status skn_panel_truncate(const skn_panel* p, const char* quarter, int step, skn_panel** out)
{
    return guarded([&] {
        require(p && quarter && out, "null argument");
        *out = new skn_panel{truncate_to_step(p->value, Quarter::parse(quarter), step)};
    });
}

size_t skn_panel_size(const skn_panel* p) { return p ? p->value.size() : 0; }

skn_status skn_panel_get(const skn_panel* p, size_t t, int series, double* value, int* observed)
{
    return guarded([&] {
        require(p && value && observed, "null argument");
        require(t < p->value.size() && (series == 0 || series == 1), "panel index out of range");
        *observed = p->value.observed(series, t) ? 1 : 0;
        *value = *observed ? p->value.y[series][t] : std::nan("");
    });
}

skn_status skn_panel_month(const skn_panel* p, size_t t, char** month)
{
    return guarded([&] {
        require(p && month, "null argument");
        require(t < p->value.size(), "panel index out of range");
        *month = dup_string(p->value.months[t].str());
    });
}

skn_status skn_panel_write_csv(const skn_panel* p, const char* path)
{
    return guarded([&] {
        require(p && path, "null argument");
        write_panel_csv(path, p->value);
    });
}

skn_status skn_panel_to_vintage(const skn_panel* p, const char* as_of, skn_vintage** out)
{
    return guarded([&] {
        require(p && as_of && out, "null argument");
        *out = new skn_vintage{panel_to_vintage(p->value, as_of)};
    });
}

void skn_panel_free(skn_panel* p) { delete p; }

void skn_estimation_options_default(skn_estimation_options* o)
{
    if (!o) return;
    const EstimationConfig c;
    o->starts = c.starts;
    o->max_iterations = c.max_iterations;
    o->relative_tolerance = c.relative_tolerance;
    o->weight = c.weight;
    o->copula = SKN_COPULA_STUDENT_T;
    o->seed = c.seed;
}

skn_status skn_estimate(const skn_panel* panel, const skn_spec* spec, const skn_estimation_options* options,
                        const skn_fit* warm, skn_fit** out)
{
    skn_status s = SKN_OK;
    try {
        require(panel && spec && out, "null argument");
        EstimationConfig c = estimation_of(options);
        if (warm) c.warm_start = warm->value.estimate;
        *out = new skn_fit{estimate(panel->value, spec->value, c)};
        g_last_error.clear();
    } catch (const std::invalid_argument& e) {
        s = fail(SKN_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        s = fail(SKN_ERR_ESTIMATION, e.what());
    }
    return s;
}

skn_status skn_fit_summary_get(const skn_fit* fit, skn_fit_summary* out)
{
    return guarded([&] {
        require(fit && out, "null argument");
        const FitResult& f = fit->value;
        out->log_lik = f.total_loglik;
        out->log_lik_indep = f.independence_loglik;
        out->log_lik_gdp = f.gdp_loglik;
        out->dependence =
            f.estimate.copula.family == CopulaFamily::independence ? std::nan("") : f.estimate.copula.dependence;
        out->copula_dof = f.estimate.copula.family == CopulaFamily::student_t ? f.estimate.copula.dof : std::nan("");
        out->aic = f.aic;
        out->bic = f.bic;
        out->objective = f.objective;
        out->n_params = f.n_params;
        out->n_obs = f.n_obs;
        out->converged = f.converged ? 1 : 0;
    });
}

skn_status skn_fit_label(const skn_fit* fit, char** out)
{
    return guarded([&] {
        require(fit && out, "null argument");
        *out = dup_string(fit->value.spec.label);
    });
}

skn_status skn_fit_spec(const skn_fit* fit, skn_spec** out)
{
    return guarded([&] {
        require(fit && out, "null argument");
        *out = new skn_spec{fit->value.spec};
    });
}

size_t skn_fit_parameter_count(const skn_fit* fit)
{
    return fit ? std::min(fit->value.parameter_names.size(), fit->value.parameter_values.size()) : 0;
}

skn_status skn_fit_parameter(const skn_fit* fit, size_t i, char** name, double* value)
{
    return guarded([&] {
        require(fit && name && value, "null argument");
        require(i < skn_fit_parameter_count(fit), "parameter index out of range");
        *name = dup_string(fit->value.parameter_names[i]);
        *value = fit->value.parameter_values[i];
    });
}

skn_status skn_fit_to_json(const skn_fit* fit, char** out)
{
    return guarded([&] {
        require(fit && out, "null argument");
        *out = dup_string(fit_to_json(fit->value));
    });
}

skn_status skn_fit_from_json(const char* json, skn_fit** out)
{
    return guarded([&] {
        require(json && out, "null argument");
        try {
            *out = new skn_fit{fit_from_json(json)};
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("fit JSON: ") + e.what());
        }
    });
}

skn_status skn_fit_write_json(const skn_fit* fit, const char* path)
{
    return guarded([&] {
        require(fit && path, "null argument");
        write_fit_json(path, fit->value);
    });
}

skn_status skn_fit_read_json(const char* path, skn_fit** out)
{
    return guarded([&] {
        require(path && out, "null argument");
        try {
            *out = new skn_fit{read_fit_json(path)};
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string(path) + ": " + e.what());
        }
    });
}

skn_status skn_fit_reference(const skn_spec* spec, skn_fit** out)
{
    return guarded([&] {
        require(spec && out, "null argument");
        FitResult f;
        f.spec = spec->value;
        f.estimate = reference_parameters(spec->value);
        f.status = "reference parameters";
        const ParameterLayout layout(f.spec, f.estimate.copula.family);
        f.n_params = layout.size();
        f.parameter_names = layout.names();
        for (const auto& e : layout.entries()) f.parameter_values.push_back(e.get(f.estimate));
        f.total_loglik = f.independence_loglik = f.gdp_loglik = f.aic = f.bic = f.objective = std::nan("");
        *out = new skn_fit{std::move(f)};
    });
}

void skn_fit_free(skn_fit* fit) { delete fit; }

skn_status skn_filter_write(const skn_fit* fit, const skn_panel* panel, const char* states_csv, const char* params_csv,
                            const char* scores_csv, double* total_loglik)
{
    return guarded([&] {
        require(fit && panel, "null argument");
        const FilterResult fr = run_filter(panel->value, fit->value.estimate, fit->value.spec);
        if (states_csv) write_states_csv(states_csv, panel->value, fr);
        if (params_csv) write_params_csv(params_csv, panel->value, fr);
        if (scores_csv) write_scores_csv(scores_csv, panel->value, fr);
        if (total_loglik) *total_loglik = fr.first_nonfinite ? -INFINITY : fr.total_loglik();
    });
}

skn_status skn_nowcast_run(const skn_fit* fit, const skn_panel* panel, const char* quarter, int step, size_t n_draws,
                       uint64_t seed, skn_nowcast** out)
{
    return guarded([&] {
        require(fit && panel && quarter && out, "null argument");
        *out = new skn_nowcast{density_nowcast(fit->value, panel->value, Quarter::parse(quarter), step, n_draws, seed)};
    });
}

skn_status skn_nowcast_mean(const skn_nowcast* d, double* out)
{
    return guarded([&] {
        require(d && out, "null argument");
        *out = point_nowcast(d->value);
    });
}

skn_status skn_nowcast_interval(const skn_nowcast* d, double coverage, double* lo, double* hi)
{
    return guarded([&] {
        require(d && lo && hi, "null argument");
        const PercentileBand b = interval(d->value, coverage);
        *lo = b.lo;
        *hi = b.hi;
    });
}

skn_status skn_nowcast_log_score(const skn_nowcast* d, double realized, double* out)
{
    return guarded([&] {
        require(d && out, "null argument");
        *out = log_score(d->value, realized);
    });
}

skn_status skn_nowcast_draws(const skn_nowcast* d, const double** draws, size_t* n)
{
    return guarded([&] {
        require(d && draws && n, "null argument");
        *draws = d->value.draws.data();
        *n = d->value.draws.size();
    });
}

skn_status skn_nowcast_write(const skn_nowcast* d, const char* density_csv, const char* summary_json)
{
    return guarded([&] {
        require(d, "null argument");
        if (density_csv) write_density_csv(density_csv, d->value);
        if (summary_json) write_nowcast_json(summary_json, d->value);
    });
}

void skn_nowcast_free(skn_nowcast* d) { delete d; }

void skn_backtest_options_default(skn_backtest_options* o)
{
    if (!o) return;
    skn_estimation_options_default(&o->estimation);
    const BacktestConfig c;
    o->n_draws = c.n_draws;
    o->warm_start = 0;
    o->regimes = nullptr;
}

skn_status skn_backtest(const skn_vintage_set* vintages, const skn_spec* const* specs, size_t n_specs,
                        const skn_backtest_options* options, uint64_t seed, skn_report** out)
{
    return guarded([&] {
        require(vintages && specs && out, "null argument");
        std::vector<Vintage> vs;
        for (const auto& v : vintages->vintages) vs.push_back(v.value);
        std::vector<ModelSpec> ms;
        for (size_t i = 0; i < n_specs; ++i) {
            require(specs[i] != nullptr, "null spec");
            ms.push_back(specs[i]->value);
        }
        BacktestConfig c;
        if (options) {
            c.estimation = estimation_of(&options->estimation);
            c.n_draws = options->n_draws;
            c.warm_start = options->warm_start != 0;
            c.regimes = parse_regimes(options->regimes);
        }
        *out = new skn_report{backtest(vs, ms, c, seed)};
    });
}

skn_status skn_report_write(const skn_report* r, const char* csv, const char* json)
{
    return guarded([&] {
        require(r, "null argument");
        if (csv) write_backtest_csv(csv, r->value);
        if (json) write_backtest_json(json, r->value);
    });
}

skn_status skn_report_read_csv(const char* path, skn_report** out)
{
    return guarded([&] {
        require(path && out, "null argument");
        BacktestReport r;
        r.entries = read_backtest_csv(path);
        r.aggregates = aggregate(r.entries, {});
        *out = new skn_report{std::move(r)};
    });
}

size_t skn_report_entry_count(const skn_report* r) { return r ? r->value.entries.size() : 0; }

size_t skn_report_failure_count(const skn_report* r) { return r ? r->value.failures.size() : 0; }

skn_status skn_report_write_fan_chart(const skn_report* r, const char* model, const char* path)
{
    return guarded([&] {
        require(r && path, "null argument");
        require(!r->value.entries.empty() || model, "report has no entries");
        const std::string m = model ? model : r->value.entries.front().model;
        const bool present = std::any_of(r->value.entries.begin(), r->value.entries.end(),
                                         [&](const BacktestEntry& e) { return e.model == m; });
        if (!present) throw std::invalid_argument("report has no entries for model " + m);
        write_fan_chart_csv(path, r->value.entries, m);
    });
}

void skn_report_free(skn_report* r) { delete r; }

skn_status skn_simulate(const skn_fit* source, size_t length, uint64_t seed, const char* start_month, skn_panel** out)
{
    return guarded([&] {
        require(source && out, "null argument");
        SimulationConfig cfg;
        cfg.spec = source->value.spec;
        cfg.theta = source->value.estimate;
        cfg.length = length;
        cfg.seed = seed;
        if (start_month) cfg.start = YearMonth::parse(start_month);
        *out = new skn_panel{simulate_panel(cfg).panel};
    });
}

skn_status skn_write_pseudo_vintages(const skn_panel* p, const char* quarters, const char* root, size_t* written)
{
    return guarded([&] {
        require(p && quarters && root, "null argument");
        const auto vintages = make_pseudo_vintages(p->value, parse_quarters(quarters));
        for (const auto& v : vintages) write_vintage(root, panel_to_vintage(v.panel, v.as_of));
        if (written) *written = vintages.size();
    });
}

}  // extern "C"
