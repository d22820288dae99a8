#include "modelspec.hpp"

#include <stdexcept>

namespace skewnow {

std::string to_string(RelatedFrequency f)
{
    return f == RelatedFrequency::monthly ? "monthly" : "rolling_quarterly";
}

std::string to_string(ScaleAggregation a)
{
    switch (a) {
    case ScaleAggregation::gaussian_approx: return "gaussian_approx";
    case ScaleAggregation::direct: return "direct";
    case ScaleAggregation::none: return "none";
    }
    return "unknown";
}

void ModelSpec::validate() const
{
    if (dynamic_shape && related_frequency != RelatedFrequency::rolling_quarterly) {
        throw std::invalid_argument(label + ": dynamic shape requires a rolling quarterly related series");
    }
    if (dynamic_shape && !(gdp_skewed() && related_skewed())) {
        throw std::invalid_argument(label + ": dynamic shape requires skewed families for both series");
    }
    if (!dynamic_scale && scale_aggregation != ScaleAggregation::none) {
        throw std::invalid_argument(label + ": constant scale requires scale_aggregation = none");
    }
    if (dynamic_scale && scale_aggregation == ScaleAggregation::none) {
        throw std::invalid_argument(label + ": dynamic scale needs a scale aggregation rule");
    }
    if (dynamic_scale && related_frequency == RelatedFrequency::monthly) {
        // Quarterly GDP linked to monthly scales is only possible with
        // Gaussian prediction errors.
        if (gdp_family != DistributionFamily::normal || scale_aggregation != ScaleAggregation::gaussian_approx) {
            throw std::invalid_argument(
                label + ": monthly related series with dynamic scale requires a normal GDP family "
                        "and gaussian_approx scale aggregation");
        }
    }
    if (scale_aggregation == ScaleAggregation::gaussian_approx) {
        if (gdp_family != DistributionFamily::normal) {
            throw std::invalid_argument(label + ": gaussian_approx scale aggregation requires normal GDP");
        }
        if (related_frequency != RelatedFrequency::monthly) {
            throw std::invalid_argument(label + ": gaussian_approx applies to monthly related series only");
        }
    }
}

ModelSpec build_spec(const std::string& label)
{
    ModelSpec s;
    s.label = label;
    using DF = DistributionFamily;
    if (label == "DVS_t") {
        s.gdp_family = s.related_family = DF::skew_t;
        s.dynamic_scale = s.dynamic_shape = true;
        s.related_frequency = RelatedFrequency::rolling_quarterly;
        s.scale_aggregation = ScaleAggregation::direct;
    } else if (label == "DVS") {
        s.gdp_family = s.related_family = DF::skew_normal;
        s.dynamic_scale = s.dynamic_shape = true;
        s.related_frequency = RelatedFrequency::rolling_quarterly;
        s.scale_aggregation = ScaleAggregation::direct;
    } else if (label == "DV_t") {
        s.gdp_family = DF::normal;
        s.related_family = DF::student_t;
        s.dynamic_scale = true;
        s.scale_aggregation = ScaleAggregation::gaussian_approx;
    } else if (label == "DV") {
        s.gdp_family = s.related_family = DF::normal;
        s.dynamic_scale = true;
        s.scale_aggregation = ScaleAggregation::gaussian_approx;
    } else if (label == "t") {
        s.gdp_family = s.related_family = DF::student_t;
    } else if (label == "benchmark") {
        s.gdp_family = s.related_family = DF::normal;
    } else {
        throw std::invalid_argument("unknown model label: " + label);
    }
    s.validate();
    return s;
}

std::vector<std::string> reference_labels() { return {"DVS_t", "DVS", "DV_t", "DV", "t", "benchmark"}; }

}  // namespace skewnow
