#pragma once

// Density nowcasts by simulating the missing months through the filter.

#include "estimation.hpp"

#include <cstdint>
#include <vector>

namespace skewnow {

struct PercentileBand {
    double coverage = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct DensityGrid {
    std::vector<double> x;
    std::vector<double> density;
};

struct DensityNowcast {
    Quarter target;
    int step = 0;
    std::vector<double> draws;
    DensityGrid grid;
    double mean = 0.0;
    std::vector<PercentileBand> percentiles;  // ascending coverage
    std::size_t n_draws = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t kGridPoints = 512;
inline constexpr std::size_t kMinDraws = 1000;
extern const std::vector<double> kDefaultCoverages;  // 0.5, 0.7, 0.9

/// Simulates GDP growth for `target` given the information in `panel` (which
/// should already be restricted to the step's information set, e.g. with
/// truncate_to_step).
///
/// Months after the last observation are simulated draw by draw: the related
/// series from its predictive marginal, and jointly with GDP through the
/// copula where both are missing. In the target quarter's last month the
/// related value (observed or simulated) is filtered in and GDP is drawn from
/// the filtered GDP density. Draw i uses the substream (seed, i).
DensityNowcast density_nowcast(const ModelParameters& theta, const ModelSpec& spec, const ObservationPanel& panel,
                               Quarter target, int step, std::size_t n_draws, std::uint64_t seed);

DensityNowcast density_nowcast(const FitResult& fit, const ObservationPanel& panel, Quarter target, int step,
                               std::size_t n_draws, std::uint64_t seed);

/// Conditional mean (the draw average).
double point_nowcast(const DensityNowcast& d);

/// Equal-tail percentile band from the draws.
PercentileBand interval(const DensityNowcast& d, double coverage);

/// Type-7 empirical quantile of sorted data.
double sorted_quantile(const std::vector<double>& sorted, double p);

/// Gaussian kernel density with Silverman's bandwidth on kGridPoints points
/// spanning [min - 4 IQR, max + 4 IQR].
DensityGrid kernel_density(std::vector<double> draws);

}  // namespace skewnow
