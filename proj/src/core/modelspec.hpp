#pragma once

#include "ast.hpp"

#include <string>
#include <vector>

namespace skewnow {

enum class RelatedFrequency { monthly, rolling_quarterly };
enum class ScaleAggregation { gaussian_approx, direct, none };

std::string to_string(RelatedFrequency f);
std::string to_string(ScaleAggregation a);

/// Declarative description of one bivariate model (GDP = series 1, the
/// related indicator = series 2).
struct ModelSpec {
    std::string label;
    DistributionFamily gdp_family = DistributionFamily::normal;
    DistributionFamily related_family = DistributionFamily::normal;
    bool dynamic_scale = false;
    bool dynamic_shape = false;
    RelatedFrequency related_frequency = RelatedFrequency::monthly;
    ScaleAggregation scale_aggregation = ScaleAggregation::none;
    /// Location common factor follows an AR(1) instead of having no persistence.
    bool location_common_ar = false;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;

    bool gdp_skewed() const { return !family_fixes_shape(gdp_family); }
    bool related_skewed() const { return !family_fixes_shape(related_family); }
    bool any_shape() const { return gdp_skewed() || related_skewed(); }
};

/// Builds one of the six reference models: DVS_t, DVS, DV_t, DV, t, benchmark.
ModelSpec build_spec(const std::string& label);

std::vector<std::string> reference_labels();

}  // namespace skewnow
