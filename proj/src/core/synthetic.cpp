#include "synthetic.hpp"

#include "rng.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace skewnow {

namespace {

constexpr double kExplosive = 1e6;

std::string iso_date(YearMonth m, int day)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", m.year, m.month, day);
    return buf;
}

}  // namespace

SimulationResult simulate_panel(const SimulationConfig& cfg)
{
    cfg.spec.validate();
    cfg.theta.validate(cfg.spec);
    if (cfg.length == 0) throw std::invalid_argument("simulation length must be positive");
    const bool rolling = cfg.spec.related_frequency == RelatedFrequency::rolling_quarterly;

    SimulationResult out;
    ObservationPanel& p = out.panel;
    p.frequency = {FrequencyTag::quarterly_at_month3, rolling ? FrequencyTag::rolling_quarterly : FrequencyTag::monthly};
    for (int s = 0; s < 2; ++s) {
        p.y[s].assign(cfg.length, 0.0);
        p.mask[s].assign(cfg.length, 0);
    }

    Rng rng(cfg.seed);
    Recursion rec(cfg.spec, cfg.theta);
    for (std::size_t t = 0; t < cfg.length; ++t) {
        const YearMonth m = cfg.start.plus(static_cast<int>(t));
        p.months.push_back(m);
        const LinkedParameters& linked = rec.predicted();
        out.predicted_states.push_back(rec.state());
        out.params.push_back(linked.params);

        Observation obs;
        obs.observed = {m.is_quarter_end(), !rolling || t >= 3};
        double u[2];
        if (obs.observed[0] && obs.observed[1]) {
            const auto [u1, u2] = copula_sample(cfg.theta.copula, rng);
            u[0] = u1;
            u[1] = u2;
        } else {
            u[0] = rng.uniform();
            u[1] = rng.uniform();
        }
        for (int s = 0; s < 2; ++s) {
            if (!obs.observed[s]) continue;
            obs.y[s] = ast_quantile(u[s], linked.params[s]);
            p.y[s][t] = obs.y[s];
            p.mask[s][t] = 1;
        }
        rec.advance(obs);
        for (std::size_t j = 0; j < kStateDim; ++j) {
            const double v = rec.state()[j];
            if (!std::isfinite(v) || std::abs(v) > kExplosive) {
                std::ostringstream msg;
                msg << "explosive state path: " << state_name(j) << " = " << v << " at month " << m.str() << " (t = " << t
                    << ")";
                throw std::runtime_error(msg.str());
            }
        }
    }
    return out;
}

ModelParameters reference_parameters(const ModelSpec& spec)
{
    ModelParameters theta;
    const auto on = dynamic_states(spec);
    const double gains[kStateDim] = {0.05, 0.05, 1.0, 0.005, 0.05, 0.3, 0.03, 0.03, 0.2};
    for (std::size_t j = 0; j < kStateDim; ++j) theta.update_gains[j] = on[j] ? gains[j] : 0.0;
    theta.prediction_gains[kLocCommon] = 0.5;
    theta.ar_scale_common = 0.6;
    theta.ar_shape_trend = 0.9;
    theta.ar_shape_common = 0.8;
    theta.loading_location = 1.0;
    theta.loading_scale = 1.0;
    theta.loading_shape = 1.0;
    theta.initial_state[kLocTrendGdp] = 0.002;
    theta.initial_state[kLocTrendRelated] = 0.002;
    theta.initial_state[kScaleTrendGdp] = std::log(0.004);
    theta.initial_state[kScaleTrendRelated] = std::log(0.01);
    theta.tail_gdp = family_gaussian_tails(spec.gdp_family) ? Tail::infinite() : Tail(6.0);
    theta.tail_related = family_gaussian_tails(spec.related_family) ? Tail::infinite() : Tail(6.0);
    theta.copula.family = CopulaFamily::gaussian;
    theta.copula.dependence = 0.5;
    return theta;
}

std::vector<PseudoVintage> make_pseudo_vintages(const ObservationPanel& panel, const std::vector<Quarter>& schedule)
{
    std::vector<PseudoVintage> out;
    if (schedule.empty()) return out;
    if (panel.size() == 0) throw std::invalid_argument("empty panel");
    for (const Quarter& q : schedule) {
        if (q.first_month() <= panel.months.front() || q.last_month() > panel.months.back()) {
            throw std::invalid_argument("scheduled quarter " + q.str() + " lies outside the panel");
        }
        for (const NowcastStep& s : nowcast_schedule(q)) {
            PseudoVintage v;
            v.as_of = iso_date(s.release_month, s.timing == "late" ? 28 : 5);
            v.target = q;
            v.step = s.step;
            v.panel = truncate_to_step(panel, q, s.step);
            out.push_back(std::move(v));
        }
    }
    return out;
}

Vintage panel_to_vintage(const ObservationPanel& panel, const std::string& as_of)
{
    panel.validate();
    Vintage v;
    v.as_of = as_of;
    const bool rolling = panel.frequency[1] == FrequencyTag::rolling_quarterly;

    // Related levels: monthly growth chains month to month; rolling quarterly
    // growth chains every third month from three base levels.
    const std::size_t n = panel.size();
    std::size_t first = n, last = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (panel.observed(1, t)) {
            first = std::min(first, t);
            last = t;
        }
    }
    if (first == n) throw std::invalid_argument("panel has no related observations");
    // Base levels sit in the months before the first growth value, which may
    // precede the panel.
    const std::size_t lag = rolling ? 3 : 1;
    v.related.start = panel.months[first].plus(-static_cast<int>(lag));
    std::vector<double> logs(last - first + 1 + lag, 0.0);
    for (std::size_t t = first; t <= last; ++t) {
        if (!panel.observed(1, t)) throw std::invalid_argument("related series has interior gaps");
        const std::size_t k = t - first + lag;
        logs[k] = logs[k - lag] + panel.y[1][t];
    }
    for (double l : logs) v.related.values.push_back(100.0 * std::exp(l));

    std::vector<std::size_t> gdp_idx;
    for (std::size_t t = 0; t < n; ++t)
        if (panel.observed(0, t)) gdp_idx.push_back(t);
    if (gdp_idx.empty()) throw std::invalid_argument("panel has no GDP observations");
    const Quarter q0 = Quarter::of(panel.months[gdp_idx.front()]);
    v.gdp.start = q0.plus(-1);
    double level = 0.0;
    v.gdp.values.push_back(100.0);
    for (std::size_t k = 0; k < gdp_idx.size(); ++k) {
        if (Quarter::of(panel.months[gdp_idx[k]]).ordinal() != q0.ordinal() + static_cast<int>(k)) {
            throw std::invalid_argument("GDP series has interior gaps");
        }
        level += panel.y[0][gdp_idx[k]];
        v.gdp.values.push_back(100.0 * std::exp(level));
    }
    return v;
}

}  // namespace skewnow
