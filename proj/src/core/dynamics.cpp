#include "dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace skewnow {

namespace {

constexpr double kShapeFloor = 1e-10;

constexpr std::size_t kLocTrend[2] = {kLocTrendGdp, kLocTrendRelated};
constexpr std::size_t kScaleTrend[2] = {kScaleTrendGdp, kScaleTrendRelated};
constexpr std::size_t kShapeTrend[2] = {kShapeTrendGdp, kShapeTrendRelated};

bool all_finite(const StateVector& z)
{
    return std::all_of(z.begin(), z.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

void LagBuffers::push(const std::array<double, 2>& loc, const std::array<double, 2>& log_scale_now)
{
    for (int i = 0; i < 2; ++i) {
        std::shift_right(location[i].begin(), location[i].end(), 1);
        std::shift_right(log_scale[i].begin(), log_scale[i].end(), 1);
        location[i][0] = loc[i];
        log_scale[i][0] = log_scale_now[i];
    }
}

LagBuffers LagBuffers::replicate(const std::array<double, 2>& loc, const std::array<double, 2>& log_scale_now)
{
    LagBuffers b;
    for (int i = 0; i < 2; ++i) {
        b.location[i].fill(loc[i]);
        b.log_scale[i].fill(log_scale_now[i]);
    }
    return b;
}

std::array<double, 2> monthly_locations(const StateVector& z, const ModelParameters& theta)
{
    return {z[kLocTrendGdp] + z[kLocCommon], z[kLocTrendRelated] + theta.loading_location * z[kLocCommon]};
}

std::array<double, 2> monthly_log_scales(const StateVector& z, const ModelParameters& theta)
{
    return {z[kScaleTrendGdp] + z[kScaleCommon], z[kScaleTrendRelated] + theta.loading_scale * z[kScaleCommon]};
}

LinkedParameters link_parameters(const StateVector& z, const ModelParameters& theta, const ModelSpec& spec,
                                 const LagBuffers& lags)
{
    const auto on = dynamic_states(spec);
    const auto loc = monthly_locations(z, theta);
    const auto log_scale = monthly_log_scales(z, theta);
    const bool aggregated[2] = {true, spec.related_frequency == RelatedFrequency::rolling_quarterly};
    const double load_loc[2] = {1.0, theta.loading_location};
    const double load_scale[2] = {1.0, theta.loading_scale};
    const double load_shape[2] = {1.0, theta.loading_shape};
    const DistributionFamily family[2] = {spec.gdp_family, spec.related_family};
    const Tail tail[2] = {theta.tail_gdp, theta.tail_related};
    const auto& w = kAggregationWeights;

    LinkedParameters out;
    for (int i = 0; i < 2; ++i) {
        ASTParams& p = out.params[i];
        LinkJacobian& jac = out.jacobian[i];

        double dmu = 1.0;
        p.location = loc[i];
        if (aggregated[i]) {
            dmu = w[0];
            p.location = w[0] * loc[i];
            for (int k = 1; k < 5; ++k) p.location += w[k] * lags.location[i][k - 1];
        }
        jac[0][kLocTrend[i]] = dmu;
        jac[0][kLocCommon] = dmu * load_loc[i];

        double dsigma;
        if (i == 0 && spec.scale_aggregation == ScaleAggregation::gaussian_approx) {
            const double current = w[0] * w[0] * std::exp(2.0 * log_scale[0]);
            double var = current;
            for (int k = 1; k < 5; ++k) var += w[k] * w[k] * std::exp(2.0 * lags.log_scale[0][k - 1]);
            p.scale = std::sqrt(var);
            dsigma = current / p.scale;
        } else {
            p.scale = std::exp(log_scale[i]);
            dsigma = p.scale;
        }
        jac[1][kScaleTrend[i]] = dsigma;
        jac[1][kScaleCommon] = dsigma * load_scale[i];

        if (family_fixes_shape(family[i])) {
            p.shape = 0.5;
        } else {
            const double x = z[kShapeTrend[i]] + load_shape[i] * z[kShapeCommon];
            p.shape = std::clamp(1.0 / (1.0 + std::exp(x)), kShapeFloor, 1.0 - kShapeFloor);
            const double da = -p.shape * (1.0 - p.shape);
            jac[2][kShapeTrend[i]] = da;
            jac[2][kShapeCommon] = da * load_shape[i];
        }

        if (family_gaussian_tails(family[i])) {
            p.tail_left = p.tail_right = Tail::infinite();
        } else {
            p.tail_left = p.tail_right = tail[i];
        }

        for (std::size_t j = 0; j < kStateDim; ++j) {
            if (!on[j]) jac[0][j] = jac[1][j] = jac[2][j] = 0.0;
        }
    }
    return out;
}

ScoredStep quasi_score(const Observation& obs, const LinkedParameters& linked, const CopulaSpec& copula)
{
    ScoredStep out;
    StateVector info{};
    for (int i = 0; i < 2; ++i) {
        if (!obs.observed[i]) continue;
        const ASTParams& p = linked.params[i];
        const LinkJacobian& jac = linked.jacobian[i];
        const ASTScore sc = ast_score(obs.y[i], p);
        const ASTInformation fi = ast_fisher(p);
        out.loglik_contribs[i] = ast_logpdf(obs.y[i], p);
        for (std::size_t j = 0; j < kStateDim; ++j) {
            out.raw_score[j] += jac[0][j] * sc.d_mu + jac[1][j] * sc.d_sigma + jac[2][j] * sc.d_alpha;
            info[j] += jac[0][j] * jac[0][j] * fi.i_mu + jac[1][j] * jac[1][j] * fi.i_sigma +
                       jac[2][j] * jac[2][j] * fi.i_alpha;
        }
    }
    for (std::size_t j = 0; j < kStateDim; ++j) {
        // Moore-Penrose on the diagonal: directions without information get no score.
        out.scaling[j] = info[j] > 0.0 ? 1.0 / info[j] : 0.0;
        out.scaled_score[j] = out.scaling[j] * out.raw_score[j];
    }
    const bool trivial_copula = copula.family == CopulaFamily::independence ||
                                (copula.family == CopulaFamily::gaussian && copula.dependence == 0.0);
    if (obs.observed[0] && obs.observed[1] && !trivial_copula) {
        const double u1 = clamp_pit(ast_cdf(obs.y[0], linked.params[0]));
        const double u2 = clamp_pit(ast_cdf(obs.y[1], linked.params[1]));
        out.copula_contrib = copula_logdensity(u1, u2, copula);
    }
    return out;
}

StepResult step(const StateVector& z, const ScoredStep& scored, const TransitionSpec& trans)
{
    StepResult r;
    for (std::size_t j = 0; j < kStateDim; ++j) {
        r.filtered[j] = z[j] + trans.update_gains[j] * scored.scaled_score[j];
        r.predicted[j] = trans.transition[j] * r.filtered[j] + trans.prediction_gains[j] * scored.scaled_score[j];
    }
    return r;
}

Recursion::Recursion(const ModelSpec& spec, const ModelParameters& theta)
    : spec_(spec), theta_(theta), trans_(theta.transition(spec)), z_(theta.initial_state), filtered_(z_)
{
    lags_ = LagBuffers::replicate(monthly_locations(z_, theta_), monthly_log_scales(z_, theta_));
    lags_before_ = lags_;
    current_ = link_parameters(z_, theta_, spec_, lags_);
}

ScoredStep Recursion::advance(const Observation& obs)
{
    ScoredStep scored = quasi_score(obs, current_, theta_.copula);
    const StepResult r = step(z_, scored, trans_);
    filtered_ = r.filtered;
    lags_before_ = lags_;
    lags_.push(monthly_locations(filtered_, theta_), monthly_log_scales(filtered_, theta_));
    z_ = r.predicted;
    current_ = link_parameters(z_, theta_, spec_, lags_);
    return scored;
}

std::array<ASTParams, 2> Recursion::filtered_params() const
{
    return link_parameters(filtered_, theta_, spec_, lags_before_).params;
}

Observation observation_at(const ObservationPanel& panel, std::size_t t)
{
    Observation o;
    for (int i = 0; i < 2; ++i) {
        o.observed[i] = panel.observed(i, t);
        o.y[i] = o.observed[i] ? panel.y[i][t] : 0.0;
    }
    return o;
}

double FilterResult::marginal_loglik(int series) const
{
    double s = 0.0;
    for (const auto& l : loglik_marginal) s += l[series];
    return s;
}

double FilterResult::copula_loglik() const
{
    double s = 0.0;
    for (double c : loglik_copula) s += c;
    return s;
}

double FilterResult::total_loglik() const { return marginal_loglik(0) + marginal_loglik(1) + copula_loglik(); }

FilterResult run_filter(const ObservationPanel& panel, const ModelParameters& theta, const ModelSpec& spec)
{
    const std::size_t n = panel.size();
    FilterResult out;
    out.predicted_states.reserve(n);
    out.filtered_states.reserve(n);
    out.predicted_params.reserve(n);
    out.filtered_params.reserve(n);
    out.loglik_marginal.reserve(n);
    out.loglik_copula.reserve(n);
    out.scaled_scores.reserve(n);

    Recursion rec(spec, theta);
    for (std::size_t t = 0; t < n; ++t) {
        out.predicted_states.push_back(rec.state());
        out.predicted_params.push_back(rec.predicted().params);
        ScoredStep s;
        try {
            s = rec.advance(observation_at(panel, t));
        } catch (const std::exception&) {
            if (!out.first_nonfinite) out.first_nonfinite = t;
            out.predicted_states.pop_back();
            out.predicted_params.pop_back();
            break;
        }
        out.filtered_states.push_back(rec.filtered_state());
        out.filtered_params.push_back(rec.filtered_params());
        out.loglik_marginal.push_back(s.loglik_contribs);
        out.loglik_copula.push_back(s.copula_contrib);
        out.scaled_scores.push_back(s.scaled_score);
        const double period = s.loglik_contribs[0] + s.loglik_contribs[1] + s.copula_contrib;
        if (!out.first_nonfinite && (!std::isfinite(period) || !all_finite(rec.state()))) out.first_nonfinite = t;
    }
    return out;
}

double filter_weighted_loglik(const ObservationPanel& panel, const ModelParameters& theta, const ModelSpec& spec)
{
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    double total = 0.0;
    try {
        Recursion rec(spec, theta);
        for (std::size_t t = 0; t < panel.size(); ++t) {
            const ScoredStep s = rec.advance(observation_at(panel, t));
            const double period = s.loglik_contribs[0] + s.copula_contrib + theta.weight * s.loglik_contribs[1];
            if (!std::isfinite(period)) return kNegInf;
            total += period;
        }
    } catch (const std::exception&) {
        // Degenerate parameters (NaN states, overflowing scales) reach the
        // special functions' domain checks.
        return kNegInf;
    }
    return std::isfinite(total) ? total : kNegInf;
}

}  // namespace skewnow
