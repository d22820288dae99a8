#include "estimation.hpp"

#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace skewnow {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kStartGains[] = {0.05, 0.02, 0.1, 0.01, 0.07};

std::array<bool, kStateDim> estimated_slots(const ModelSpec& spec)
{
    auto on = dynamic_states(spec);
    if (spec.dynamic_shape) {
        on[kShapeTrendGdp] = spec.gdp_skewed();
        on[kShapeTrendRelated] = spec.related_skewed();
        on[kShapeCommon] = spec.any_shape();
    }
    return on;
}

struct Moments {
    double mean = 0.0;
    double spread = 1.0;
};

Moments robust_moments(std::vector<double> v)
{
    Moments m;
    if (v.empty()) return m;
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    const auto median = [](std::vector<double> x) {
        const std::size_t k = x.size() / 2;
        std::nth_element(x.begin(), x.begin() + static_cast<long>(k), x.end());
        return x[k];
    };
    const double med = median(v);
    for (double& x : v) x = std::abs(x - med);
    m.spread = 1.4826 * median(v);
    if (!(m.spread > 0.0)) {
        double ss = 0.0;
        for (double x : v) ss += x * x;
        m.spread = std::sqrt(ss / static_cast<double>(v.size()));
    }
    if (!(m.spread > 0.0)) m.spread = 1.0;
    return m;
}

/// AST scale giving standard deviation `sd` at shape 0.5 and tail `nu`.
double scale_for_sd(double sd, Tail nu)
{
    double var_factor = 1.0;
    if (!nu.is_infinite()) var_factor = std::sqrt(nu.value() / (nu.value() - 2.0));
    return sd / (k_const(nu) * var_factor);
}

}  // namespace

double ParameterLayout::forward(Transform t, double floor, double natural)
{
    switch (t) {
    case Transform::identity: return natural;
    case Transform::exp: return std::log(natural);
    case Transform::tanh: return std::atanh(natural);
    case Transform::exp_floor: return std::log(natural - floor);
    }
    return natural;
}

double ParameterLayout::inverse(Transform t, double floor, double free)
{
    switch (t) {
    case Transform::identity: return free;
    case Transform::exp: return std::exp(free);
    case Transform::tanh: return std::tanh(free);
    case Transform::exp_floor: return floor + std::exp(free);
    }
    return free;
}

ParameterLayout::ParameterLayout(const ModelSpec& spec, CopulaFamily copula)
{
    const auto add = [&](std::string name, Transform t, double floor, auto field) {
        FreeParameter p;
        p.name = std::move(name);
        p.transform = t;
        p.floor = floor;
        p.get = [field](const ModelParameters& m) { return field(const_cast<ModelParameters&>(m)); };
        p.set = [field](ModelParameters& m, double v) { field(m) = v; };
        entries_.push_back(std::move(p));
    };
    const auto tail = [&](std::string name, Tail ModelParameters::*member) {
        FreeParameter p;
        p.name = std::move(name);
        p.transform = Transform::exp_floor;
        p.floor = kTailFloor;
        p.get = [member](const ModelParameters& m) { return (m.*member).value(); };
        p.set = [member](ModelParameters& m, double v) { m.*member = Tail(v); };
        entries_.push_back(std::move(p));
    };

    const auto on = estimated_slots(spec);
    for (std::size_t j = 0; j < kStateDim; ++j) {
        if (!on[j]) continue;
        add(std::string("update_gain_") + state_name(j), Transform::exp, 0.0,
            [j](ModelParameters& m) -> double& { return m.update_gains[j]; });
    }
    add("prediction_gain_loc_common", Transform::exp, 0.0,
        [](ModelParameters& m) -> double& { return m.prediction_gains[kLocCommon]; });

    if (spec.location_common_ar) {
        add("ar_loc_common", Transform::tanh, 0.0, [](ModelParameters& m) -> double& { return m.ar_location_common; });
    }
    if (spec.dynamic_scale) {
        add("ar_scale_common", Transform::tanh, 0.0, [](ModelParameters& m) -> double& { return m.ar_scale_common; });
    }
    if (spec.dynamic_shape) {
        if (spec.gdp_skewed() || spec.related_skewed()) {
            add("ar_shape_trend", Transform::tanh, 0.0, [](ModelParameters& m) -> double& { return m.ar_shape_trend; });
        }
        add("ar_shape_common", Transform::tanh, 0.0, [](ModelParameters& m) -> double& { return m.ar_shape_common; });
    }

    add("loading_location", Transform::identity, 0.0, [](ModelParameters& m) -> double& { return m.loading_location; });
    if (spec.dynamic_scale) {
        add("loading_scale", Transform::identity, 0.0, [](ModelParameters& m) -> double& { return m.loading_scale; });
    }
    if (spec.dynamic_shape && spec.related_skewed()) {
        add("loading_shape", Transform::identity, 0.0, [](ModelParameters& m) -> double& { return m.loading_shape; });
    }

    if (!family_gaussian_tails(spec.gdp_family)) tail("tail_gdp", &ModelParameters::tail_gdp);
    if (!family_gaussian_tails(spec.related_family)) tail("tail_related", &ModelParameters::tail_related);

    if (copula != CopulaFamily::independence) {
        add("copula_dependence", Transform::tanh, 0.0, [](ModelParameters& m) -> double& { return m.copula.dependence; });
    }
    if (copula == CopulaFamily::student_t) {
        add("copula_dof", Transform::exp_floor, kCopulaDofFloor,
            [](ModelParameters& m) -> double& { return m.copula.dof; });
    }

    std::vector<std::size_t> initial = {kLocTrendGdp, kLocTrendRelated, kScaleTrendGdp, kScaleTrendRelated};
    if (spec.gdp_skewed()) initial.push_back(kShapeTrendGdp);
    if (spec.related_skewed()) initial.push_back(kShapeTrendRelated);
    for (std::size_t j : initial) {
        add(std::string("initial_") + state_name(j), Transform::identity, 0.0,
            [j](ModelParameters& m) -> double& { return m.initial_state[j]; });
    }
}

std::vector<std::string> ParameterLayout::names() const
{
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
}

std::vector<double> ParameterLayout::to_free(const ModelParameters& theta) const
{
    std::vector<double> x;
    x.reserve(entries_.size());
    for (const auto& e : entries_) x.push_back(forward(e.transform, e.floor, e.get(theta)));
    return x;
}

ModelParameters ParameterLayout::to_natural(const std::vector<double>& x, ModelParameters base) const
{
    if (x.size() != entries_.size()) throw std::invalid_argument("parameter vector has the wrong length");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i].set(base, inverse(entries_[i].transform, entries_[i].floor, x[i]));
    }
    return base;
}

std::size_t count_parameters(const ModelSpec& spec, CopulaFamily copula) { return ParameterLayout(spec, copula).size(); }

double weighted_loglik(const ModelParameters& theta, const ObservationPanel& panel, const ModelSpec& spec)
{
    try {
        theta.validate(spec);
    } catch (const std::exception&) {
        return kNegInf;
    }
    return filter_weighted_loglik(panel, theta, spec);
}

InformationCriteria information_criteria(double loglik, std::size_t p, std::size_t n)
{
    const double pp = static_cast<double>(p);
    return {-2.0 * loglik + 2.0 * pp, -2.0 * loglik + std::log(static_cast<double>(n)) * pp};
}

ModelParameters default_start(const ObservationPanel& panel, const ModelSpec& spec, const EstimationConfig& config,
                              double gain)
{
    std::vector<double> obs[2];
    std::vector<std::pair<double, double>> joint;
    for (std::size_t t = 0; t < panel.size(); ++t) {
        for (int i = 0; i < 2; ++i)
            if (panel.observed(i, t)) obs[i].push_back(panel.y[i][t]);
        if (panel.observed(0, t) && panel.observed(1, t)) joint.emplace_back(panel.y[0][t], panel.y[1][t]);
    }
    const Moments gdp = robust_moments(obs[0]);
    const Moments rel = robust_moments(obs[1]);

    ModelParameters theta;
    theta.weight = config.weight;
    theta.copula.family = config.copula;
    theta.copula.dof = 8.0;
    theta.tail_gdp = family_gaussian_tails(spec.gdp_family) ? Tail::infinite() : Tail(8.0);
    theta.tail_related = family_gaussian_tails(spec.related_family) ? Tail::infinite() : Tail(8.0);

    const bool related_quarterly = spec.related_frequency == RelatedFrequency::rolling_quarterly;
    theta.initial_state[kLocTrendGdp] = gdp.mean / 3.0;
    theta.initial_state[kLocTrendRelated] = related_quarterly ? rel.mean / 3.0 : rel.mean;

    double gdp_scale = scale_for_sd(gdp.spread, theta.tail_gdp);
    if (spec.scale_aggregation == ScaleAggregation::gaussian_approx) gdp_scale *= 3.0 / std::sqrt(19.0);
    theta.initial_state[kScaleTrendGdp] = std::log(gdp_scale);
    theta.initial_state[kScaleTrendRelated] = std::log(scale_for_sd(rel.spread, theta.tail_related));

    const auto on = estimated_slots(spec);
    for (std::size_t j = 0; j < kStateDim; ++j) theta.update_gains[j] = on[j] ? gain : 0.0;
    theta.prediction_gains[kLocCommon] = gain;
    theta.ar_scale_common = 0.9;
    theta.ar_shape_trend = 0.9;
    theta.ar_shape_common = 0.9;

    if (config.copula != CopulaFamily::independence && joint.size() >= 3) {
        double mx = 0, my = 0;
        for (auto [a, b] : joint) mx += a, my += b;
        mx /= joint.size();
        my /= joint.size();
        double sxy = 0, sxx = 0, syy = 0;
        for (auto [a, b] : joint) {
            sxy += (a - mx) * (b - my);
            sxx += (a - mx) * (a - mx);
            syy += (b - my) * (b - my);
        }
        const double r = sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
        theta.copula.dependence = std::clamp(0.5 * r, -0.8, 0.8);
    }
    return theta;
}

FitResult summarize_fit(const ObservationPanel& panel, const ModelSpec& spec, const ModelParameters& theta)
{
    FitResult fit;
    fit.spec = spec;
    fit.estimate = theta;
    const FilterResult fr = run_filter(panel, theta, spec);
    fit.total_loglik = fr.first_nonfinite ? kNegInf : fr.total_loglik();
    fit.independence_loglik = fr.marginal_loglik(0) + fr.marginal_loglik(1);
    fit.gdp_loglik = fr.marginal_loglik(0);
    fit.objective = weighted_loglik(theta, panel, spec);
    const ParameterLayout layout(spec, theta.copula.family);
    fit.n_params = layout.size();
    fit.n_obs = panel.observation_count();
    const auto ic = information_criteria(fit.total_loglik, fit.n_params, fit.n_obs);
    fit.aic = ic.aic;
    fit.bic = ic.bic;
    fit.parameter_names = layout.names();
    for (const auto& e : layout.entries()) fit.parameter_values.push_back(e.get(theta));
    return fit;
}

FitResult estimate(const ObservationPanel& panel, const ModelSpec& spec, const EstimationConfig& config)
{
    spec.validate();
    panel.validate();
    if (config.starts == 0) throw std::invalid_argument("at least one start is required");
    if (!(config.weight >= 0.0 && config.weight <= 1.0)) throw std::invalid_argument("weight must lie in [0,1]");

    const ParameterLayout layout(spec, config.copula);
    std::vector<ModelParameters> starts;
    if (config.warm_start) {
        ModelParameters warm = *config.warm_start;
        warm.weight = config.weight;
        warm.copula.family = config.copula;
        if (config.copula == CopulaFamily::independence) warm.copula.dependence = 0.0;
        starts.push_back(warm);
    }
    for (std::size_t k = 0; starts.size() < config.starts; ++k) {
        ModelParameters theta = default_start(panel, spec, config, kStartGains[k % std::size(kStartGains)]);
        if (k > 0) {
            Rng rng = Rng::substream(config.seed, k);
            for (std::size_t j : {kLocTrendGdp, kLocTrendRelated, kScaleTrendGdp, kScaleTrendRelated}) {
                const double mag = j < kScaleTrendGdp ? 0.1 * std::abs(theta.initial_state[j]) + 1e-3 : 0.1;
                theta.initial_state[j] += mag * (2.0 * rng.uniform() - 1.0);
            }
        }
        starts.push_back(theta);
    }

    OptimizerOptions opts;
    opts.max_iterations = config.max_iterations;
    opts.relative_tolerance = config.relative_tolerance;

    FitResult best;
    double best_value = kNegInf;
    std::vector<StartRecord> records;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        const ModelParameters& base = starts[k];
        StartRecord rec;
        rec.index = k;
        std::vector<double> x0;
        try {
            x0 = layout.to_free(base);
        } catch (const std::exception& e) {
            rec.message = e.what();
            records.push_back(rec);
            continue;
        }
        const Objective f = [&](const std::vector<double>& x) {
            return -weighted_loglik(layout.to_natural(x, base), panel, spec);
        };
        rec.initial_objective = -f(x0);
        const OptimizerResult r = bfgs_minimize(f, x0, opts);
        rec.final_objective = -r.value;
        rec.iterations = r.iterations;
        rec.converged = r.converged;
        rec.message = r.message;
        records.push_back(rec);
        if (std::isfinite(rec.final_objective) && rec.final_objective > best_value) {
            best_value = rec.final_objective;
            best = summarize_fit(panel, spec, layout.to_natural(r.x, base));
            best.converged = r.converged;
            best.iterations = r.iterations;
            best.status = r.message;
        }
    }
    if (!std::isfinite(best_value)) {
        std::ostringstream msg;
        msg << "estimation failed for " << spec.label << ":";
        for (const auto& r : records) msg << " [start " << r.index << ": " << r.message << "]";
        throw std::runtime_error(msg.str());
    }
    best.starts = std::move(records);
    return best;
}

}  // namespace skewnow
