#ifndef SKEWNOW_H
#define SKEWNOW_H

/*
 * C interface to the skewnow density nowcasting library.
 *
 * Every function returns an skn_status; on failure skn_last_error() gives a
 * message for the calling thread. Objects are opaque handles released with
 * their *_free function. Strings returned through char** are released with
 * skn_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SKN_API __declspec(dllexport)
#else
#define SKN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    SKN_OK = 0,
    SKN_ERR_INVALID_ARGUMENT = 1,
    SKN_ERR_DOMAIN = 2,
    SKN_ERR_IO = 3,
    SKN_ERR_PARSE = 4,
    SKN_ERR_ESTIMATION = 5,
    SKN_ERR_RUNTIME = 6
} skn_status;

typedef enum { SKN_COPULA_INDEPENDENCE = 0, SKN_COPULA_GAUSSIAN = 1, SKN_COPULA_STUDENT_T = 2 } skn_copula_family;

typedef struct skn_spec skn_spec;
typedef struct skn_vintage skn_vintage;
typedef struct skn_vintage_set skn_vintage_set;
typedef struct skn_panel skn_panel;
typedef struct skn_fit skn_fit;
typedef struct skn_nowcast skn_nowcast;
typedef struct skn_report skn_report;

SKN_API const char* skn_last_error(void);
SKN_API const char* skn_version(void);
SKN_API void skn_string_free(char* s);

/* ---- AST distribution; tails use INFINITY for the Gaussian kernel ---- */

typedef struct {
    double location;
    double scale;
    double shape;
    double tail_left;
    double tail_right;
} skn_ast_params;

SKN_API skn_status skn_k_const(double nu, double* out);
SKN_API skn_status skn_ast_logpdf(double y, const skn_ast_params* p, double* out);
SKN_API skn_status skn_ast_cdf(double y, const skn_ast_params* p, double* out);
SKN_API skn_status skn_ast_quantile(double u, const skn_ast_params* p, double* out);
SKN_API skn_status skn_ast_mean(const skn_ast_params* p, double* out);
/* out[0..2] = d/dmu, d/dsigma, d/dalpha */
SKN_API skn_status skn_ast_score(double y, const skn_ast_params* p, double out[3]);
/* out[0..2] = I_mu, I_sigma, I_alpha */
SKN_API skn_status skn_ast_fisher(const skn_ast_params* p, double out[3]);
SKN_API skn_status skn_ast_sample(const skn_ast_params* p, size_t n, uint64_t seed, double* out);

SKN_API skn_status skn_copula_logdensity(double u1, double u2, skn_copula_family family, double dependence, double dof,
                                         double* out);
SKN_API skn_status skn_information_criteria(double loglik, size_t p, size_t n, double* aic, double* bic);

/* ---- model specifications ---- */

/* label: DVS_t, DVS, DV_t, DV, t or benchmark */
SKN_API skn_status skn_spec_build(const char* label, skn_spec** out);
SKN_API skn_status skn_spec_from_json(const char* json, skn_spec** out);
SKN_API skn_status skn_spec_to_json(const skn_spec* spec, char** out);
SKN_API skn_status skn_spec_parameter_count(const skn_spec* spec, skn_copula_family copula, size_t* out);
SKN_API void skn_spec_free(skn_spec* spec);

/* ---- vintages and panels ---- */

SKN_API skn_status skn_vintage_load(const char* dir, skn_vintage** out);
/* Writes <root>/<as_of>/{gdp,related}.csv */
SKN_API skn_status skn_vintage_write(const skn_vintage* v, const char* root);
SKN_API skn_status skn_vintage_as_of(const skn_vintage* v, char** out);
SKN_API skn_status skn_vintage_correlation(const skn_vintage* v, double* correlation, size_t* quarters, int* in_band);
SKN_API void skn_vintage_free(skn_vintage* v);

/* endpoint: directory, file:// URL or http:// base URL. Per-vintage failures
 * are kept in the set; the call fails only on invalid arguments. */
SKN_API skn_status skn_vintages_fetch(const char* endpoint, const char* from, const char* to, skn_vintage_set** out);
SKN_API size_t skn_vintage_set_size(const skn_vintage_set* set);
/* Borrowed pointer, valid while the set lives. */
SKN_API const skn_vintage* skn_vintage_set_get(const skn_vintage_set* set, size_t i);
SKN_API size_t skn_vintage_set_error_count(const skn_vintage_set* set);
SKN_API skn_status skn_vintage_set_error(const skn_vintage_set* set, size_t i, char** as_of, char** message);
SKN_API void skn_vintage_set_free(skn_vintage_set* set);

SKN_API skn_status skn_panel_align(const skn_vintage* v, const skn_spec* spec, skn_panel** out);
/* quarter: YYYY-Qn; step 1..4 */
SKN_API skn_status skn_panel_truncate(const skn_panel* p, const char* quarter, int step, skn_panel** out);
SKN_API size_t skn_panel_size(const skn_panel* p);
/* series 0 = GDP, 1 = related; month written as YYYY-MM when non-null */
SKN_API skn_status skn_panel_get(const skn_panel* p, size_t t, int series, double* value, int* observed);
SKN_API skn_status skn_panel_month(const skn_panel* p, size_t t, char** month);
/* month,gdp,related */
SKN_API skn_status skn_panel_write_csv(const skn_panel* p, const char* path);
SKN_API skn_status skn_panel_to_vintage(const skn_panel* p, const char* as_of, skn_vintage** out);
SKN_API void skn_panel_free(skn_panel* p);

/* ---- estimation ---- */

typedef struct {
    size_t starts;
    size_t max_iterations;
    double relative_tolerance;
    double weight;
    skn_copula_family copula;
    uint64_t seed;
} skn_estimation_options;

SKN_API void skn_estimation_options_default(skn_estimation_options* o);

/* warm may be NULL */
SKN_API skn_status skn_estimate(const skn_panel* panel, const skn_spec* spec, const skn_estimation_options* options,
                                const skn_fit* warm, skn_fit** out);

typedef struct {
    double log_lik;
    double log_lik_indep;
    double log_lik_gdp;
    double dependence; /* NAN without a copula */
    double copula_dof; /* NAN unless Student-t */
    double aic;
    double bic;
    double objective;
    size_t n_params;
    size_t n_obs;
    int converged;
} skn_fit_summary;

SKN_API skn_status skn_fit_summary_get(const skn_fit* fit, skn_fit_summary* out);
SKN_API skn_status skn_fit_label(const skn_fit* fit, char** out);
SKN_API skn_status skn_fit_spec(const skn_fit* fit, skn_spec** out);
/* Free parameters in natural units, by name. */
SKN_API size_t skn_fit_parameter_count(const skn_fit* fit);
SKN_API skn_status skn_fit_parameter(const skn_fit* fit, size_t i, char** name, double* value);
SKN_API skn_status skn_fit_to_json(const skn_fit* fit, char** out);
SKN_API skn_status skn_fit_from_json(const char* json, skn_fit** out);
SKN_API skn_status skn_fit_write_json(const skn_fit* fit, const char* path);
SKN_API skn_status skn_fit_read_json(const char* path, skn_fit** out);
/* Reference parameters for simulation, wrapped as an (unestimated) fit. */
SKN_API skn_status skn_fit_reference(const skn_spec* spec, skn_fit** out);
SKN_API void skn_fit_free(skn_fit* fit);

/* Runs the filter; any path may be NULL to skip that file.
 * states: month,state,predicted,filtered
 * params: month,series,location,scale,shape
 * scores: month,state,scaled_score */
SKN_API skn_status skn_filter_write(const skn_fit* fit, const skn_panel* panel, const char* states_csv,
                                    const char* params_csv, const char* scores_csv, double* total_loglik);

/* ---- nowcasts ---- */

SKN_API skn_status skn_nowcast_run(const skn_fit* fit, const skn_panel* panel, const char* quarter, int step,
                                   size_t n_draws, uint64_t seed, skn_nowcast** out);
SKN_API skn_status skn_nowcast_mean(const skn_nowcast* d, double* out);
SKN_API skn_status skn_nowcast_interval(const skn_nowcast* d, double coverage, double* lo, double* hi);
SKN_API skn_status skn_nowcast_log_score(const skn_nowcast* d, double realized, double* out);
/* Borrowed pointer to the draws. */
SKN_API skn_status skn_nowcast_draws(const skn_nowcast* d, const double** draws, size_t* n);
/* density: x,density; summary: JSON. Either may be NULL. */
SKN_API skn_status skn_nowcast_write(const skn_nowcast* d, const char* density_csv, const char* summary_json);
SKN_API void skn_nowcast_free(skn_nowcast* d);

/* ---- backtest ---- */

typedef struct {
    skn_estimation_options estimation;
    size_t n_draws;
    int warm_start;
    /* "name=2020-Q1,2020-Q2;other=2020-Q3" or NULL */
    const char* regimes;
} skn_backtest_options;

SKN_API void skn_backtest_options_default(skn_backtest_options* o);
SKN_API skn_status skn_backtest(const skn_vintage_set* vintages, const skn_spec* const* specs, size_t n_specs,
                                const skn_backtest_options* options, uint64_t seed, skn_report** out);
/* csv: model,quarter,step,metric,value; json: aggregates. Either may be NULL. */
SKN_API skn_status skn_report_write(const skn_report* r, const char* csv, const char* json);
SKN_API skn_status skn_report_read_csv(const char* path, skn_report** out);
SKN_API size_t skn_report_entry_count(const skn_report* r);
SKN_API size_t skn_report_failure_count(const skn_report* r);
/* quarter,step,mean,lo90,hi90,realized; model NULL selects the first model */
SKN_API skn_status skn_report_write_fan_chart(const skn_report* r, const char* model, const char* path);
SKN_API void skn_report_free(skn_report* r);

/* ---- simulation ---- */

/* theta from `source` (an estimated or reference fit); start_month YYYY-MM or NULL for 1970-01 */
SKN_API skn_status skn_simulate(const skn_fit* source, size_t length, uint64_t seed, const char* start_month,
                                skn_panel** out);
/* Writes one vintage directory per (quarter, step) for each listed quarter ("2019-Q1,2019-Q2"). */
SKN_API skn_status skn_write_pseudo_vintages(const skn_panel* p, const char* quarters, const char* root,
                                             size_t* written);

#ifdef __cplusplus
}
#endif

#endif
