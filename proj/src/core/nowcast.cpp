#include "nowcast.hpp"

#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace skewnow {

const std::vector<double> kDefaultCoverages = {0.5, 0.7, 0.9};

double sorted_quantile(const std::vector<double>& sorted, double p)
{
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DensityGrid kernel_density(std::vector<double> draws)
{
    if (draws.size() < 2) throw std::invalid_argument("kernel density needs at least two draws");
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : draws) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double iqr = sorted_quantile(draws, 0.75) - sorted_quantile(draws, 0.25);
    double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    if (!(spread > 0.0)) spread = std::max(std::abs(mean), 1.0) * 1e-6;

    const double pad = 4.0 * (iqr > 0.0 ? iqr : spread);
    const double lo = draws.front() - pad;
    const double hi = draws.back() + pad;
    const double dx = (hi - lo) / static_cast<double>(kGridPoints - 1);
    // A bandwidth below the grid spacing would leave the grid unable to
    // resolve the kernels.
    const double h = std::max(0.9 * spread * std::pow(n, -0.2), dx / 1.5);

    DensityGrid g;
    g.x.resize(kGridPoints);
    g.density.assign(kGridPoints, 0.0);
    const double norm = 1.0 / (n * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t k = 0; k < kGridPoints; ++k) {
        const double x = lo + dx * static_cast<double>(k);
        g.x[k] = x;
        const auto first = std::lower_bound(draws.begin(), draws.end(), x - 8.0 * h);
        const auto last = std::upper_bound(first, draws.end(), x + 8.0 * h);
        double s = 0.0;
        for (auto it = first; it != last; ++it) {
            const double z = (x - *it) / h;
            s += std::exp(-0.5 * z * z);
        }
        g.density[k] = s * norm;
    }
    return g;
}

DensityNowcast density_nowcast(const ModelParameters& theta, const ModelSpec& spec, const ObservationPanel& panel,
                               Quarter target, int step, std::size_t n_draws, std::uint64_t seed)
{
    spec.validate();
    theta.validate(spec);
    if (step < 1 || step > 4) throw std::invalid_argument("nowcast step must be 1..4");
    if (n_draws < kMinDraws) throw std::invalid_argument("at least 1000 draws are required");
    if (panel.size() == 0) throw std::invalid_argument("empty panel");

    const YearMonth end = target.last_month();
    const YearMonth first = panel.months.front();
    if (end < first) throw std::domain_error("target quarter precedes the panel");
    if (end > panel.months.back().plus(3)) {
        throw std::domain_error("target " + target.str() + " lies beyond the nowcast horizon of the panel ending " +
                                panel.months.back().str());
    }
    const std::size_t t_end = static_cast<std::size_t>(end.ordinal() - first.ordinal());
    if (t_end < panel.size() && panel.observed(0, t_end)) {
        throw std::domain_error("GDP for " + target.str() + " is already observed");
    }
    const auto obs_at = [&](std::size_t t) {
        return t < panel.size() ? observation_at(panel, t) : Observation{};
    };

    // Deterministic prefix: everything up to the last month with data, but
    // never the target month itself.
    std::size_t prefix = 0;
    for (std::size_t t = 0; t < std::min(panel.size(), t_end); ++t) {
        if (panel.observed(0, t) || panel.observed(1, t)) prefix = t + 1;
    }
    Recursion base(spec, theta);
    for (std::size_t t = 0; t < prefix; ++t) base.advance(obs_at(t));

    const Observation at_target = obs_at(t_end);
    const bool no_simulated_months = prefix == t_end && at_target.observed[1];
    std::array<ASTParams, 2> fixed_filtered{};
    if (no_simulated_months) {
        Recursion r = base;
        r.advance(at_target);
        fixed_filtered = r.filtered_params();
    }

    DensityNowcast out;
    out.target = target;
    out.step = step;
    out.n_draws = n_draws;
    out.seed = seed;
    out.draws.resize(n_draws);
    for (std::size_t i = 0; i < n_draws; ++i) {
        Rng rng = Rng::substream(seed, i);
        if (no_simulated_months) {
            out.draws[i] = ast_quantile(rng.uniform(), fixed_filtered[0]);
            continue;
        }
        Recursion r = base;
        for (std::size_t t = prefix; t < t_end; ++t) {
            Observation o = obs_at(t);
            const auto& pred = r.predicted().params;
            const bool gdp_slot = first.plus(static_cast<int>(t)).is_quarter_end() && !o.observed[0];
            const bool rel_slot = !o.observed[1];
            if (gdp_slot && rel_slot) {
                const auto [u1, u2] = copula_sample(theta.copula, rng);
                o.y = {ast_quantile(u1, pred[0]), ast_quantile(u2, pred[1])};
                o.observed = {true, true};
            } else if (rel_slot) {
                o.y[1] = ast_quantile(rng.uniform(), pred[1]);
                o.observed[1] = true;
            } else if (gdp_slot) {
                o.y[0] = ast_quantile(rng.uniform(), pred[0]);
                o.observed[0] = true;
            }
            r.advance(o);
        }
        Observation o = at_target;
        o.observed[0] = false;
        double u1;
        if (o.observed[1]) {
            u1 = rng.uniform();
        } else {
            const auto [a, b] = copula_sample(theta.copula, rng);
            u1 = a;
            o.y[1] = ast_quantile(b, r.predicted().params[1]);
            o.observed[1] = true;
        }
        r.advance(o);
        out.draws[i] = ast_quantile(u1, r.filtered_params()[0]);
    }

    out.mean = std::accumulate(out.draws.begin(), out.draws.end(), 0.0) / static_cast<double>(n_draws);
    for (double c : kDefaultCoverages) out.percentiles.push_back(interval(out, c));
    out.grid = kernel_density(out.draws);
    return out;
}

DensityNowcast density_nowcast(const FitResult& fit, const ObservationPanel& panel, Quarter target, int step,
                               std::size_t n_draws, std::uint64_t seed)
{
    return density_nowcast(fit.estimate, fit.spec, panel, target, step, n_draws, seed);
}

double point_nowcast(const DensityNowcast& d) { return d.mean; }

PercentileBand interval(const DensityNowcast& d, double coverage)
{
    if (!(coverage >= 0.0 && coverage < 1.0)) throw std::invalid_argument("coverage must lie in [0,1)");
    std::vector<double> sorted = d.draws;
    std::sort(sorted.begin(), sorted.end());
    const double tail = 0.5 * (1.0 - coverage);
    return {coverage, sorted_quantile(sorted, tail), sorted_quantile(sorted, 1.0 - tail)};
}

}  // namespace skewnow
