#include "parameters.hpp"

#include <cmath>
#include <stdexcept>

namespace skewnow {

const char* state_name(std::size_t index)
{
    static constexpr const char* kNames[kStateDim] = {
        "loc_trend_gdp",   "loc_trend_related",   "loc_common",
        "scale_trend_gdp", "scale_trend_related", "scale_common",
        "shape_trend_gdp", "shape_trend_related", "shape_common",
    };
    return index < kStateDim ? kNames[index] : "?";
}

std::array<bool, kStateDim> dynamic_states(const ModelSpec& spec)
{
    std::array<bool, kStateDim> on{};
    on[kLocTrendGdp] = on[kLocTrendRelated] = on[kLocCommon] = true;
    if (spec.dynamic_scale) on[kScaleTrendGdp] = on[kScaleTrendRelated] = on[kScaleCommon] = true;
    if (spec.dynamic_shape) on[kShapeTrendGdp] = on[kShapeTrendRelated] = on[kShapeCommon] = true;
    return on;
}

TransitionSpec ModelParameters::transition(const ModelSpec& spec) const
{
    const auto on = dynamic_states(spec);
    TransitionSpec t;
    t.transition.fill(1.0);
    t.transition[kLocCommon] = spec.location_common_ar ? ar_location_common : 0.0;
    if (spec.dynamic_scale) {
        t.transition[kScaleCommon] = ar_scale_common;
    }
    if (spec.dynamic_shape) {
        t.transition[kShapeTrendGdp] = t.transition[kShapeTrendRelated] = ar_shape_trend;
        t.transition[kShapeCommon] = ar_shape_common;
    }
    for (std::size_t j = 0; j < kStateDim; ++j) {
        t.update_gains[j] = on[j] ? update_gains[j] : 0.0;
    }
    t.prediction_gains[kLocCommon] = prediction_gains[kLocCommon];
    return t;
}

void ModelParameters::validate(const ModelSpec& spec) const
{
    for (double v : initial_state)
        if (!std::isfinite(v)) throw std::domain_error("initial state must be finite");
    for (std::size_t j = 0; j < kStateDim; ++j) {
        if (!(update_gains[j] >= 0.0) || !(prediction_gains[j] >= 0.0)) {
            throw std::domain_error(std::string("gains must be non-negative: ") + state_name(j));
        }
    }
    const auto stationary = [](double phi) { return std::abs(phi) < 1.0; };
    if (spec.location_common_ar && !stationary(ar_location_common)) throw std::domain_error("AR coefficient outside (-1,1)");
    if (spec.dynamic_scale && !stationary(ar_scale_common)) throw std::domain_error("AR coefficient outside (-1,1)");
    if (spec.dynamic_shape && !(stationary(ar_shape_trend) && stationary(ar_shape_common))) {
        throw std::domain_error("AR coefficient outside (-1,1)");
    }
    if (!std::isfinite(loading_location) || !std::isfinite(loading_scale) || !std::isfinite(loading_shape)) {
        throw std::domain_error("loadings must be finite");
    }
    for (Tail t : {tail_gdp, tail_related}) {
        if (!t.is_infinite() && !(t.value() > 0.0)) throw std::domain_error("tail parameters must be positive");
    }
    copula.validate();
    if (!(weight >= 0.0 && weight <= 1.0)) throw std::domain_error("weight W must lie in [0,1]");
}

}  // namespace skewnow
