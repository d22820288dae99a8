#pragma once

#include "ast.hpp"
#include "copula.hpp"
#include "modelspec.hpp"

#include <array>
#include <cstddef>
#include <string>

namespace skewnow {

/// Slots of the dynamic state vector. Series 0 is GDP, series 1 the related
/// indicator.
enum StateIndex : std::size_t {
    kLocTrendGdp = 0,
    kLocTrendRelated,
    kLocCommon,
    kScaleTrendGdp,
    kScaleTrendRelated,
    kScaleCommon,
    kShapeTrendGdp,
    kShapeTrendRelated,
    kShapeCommon,
    kStateDim
};

using StateVector = std::array<double, kStateDim>;

const char* state_name(std::size_t index);

/// Diagonal transition B, prediction gains A, update gains D.
struct TransitionSpec {
    StateVector transition{};
    StateVector prediction_gains{};
    StateVector update_gains{};
};

/// Which slots carry score-driven dynamics under `spec`.
std::array<bool, kStateDim> dynamic_states(const ModelSpec& spec);

/// Full parameter set in natural units.
struct ModelParameters {
    StateVector initial_state{};
    StateVector update_gains{};
    /// Only the location common factor carries a separate prediction gain.
    StateVector prediction_gains{};

    double ar_location_common = 0.0;
    double ar_scale_common = 0.0;
    double ar_shape_trend = 0.0;
    double ar_shape_common = 0.0;

    // Series-2 loadings on the common factors; GDP loadings are fixed at one.
    double loading_location = 1.0;
    double loading_scale = 1.0;
    double loading_shape = 1.0;

    Tail tail_gdp = Tail::infinite();
    Tail tail_related = Tail::infinite();

    CopulaSpec copula;
    double weight = 1.0 / 3.0;

    /// B, A and D with inactive slots zeroed (static slots keep B = 1).
    TransitionSpec transition(const ModelSpec& spec) const;

    void validate(const ModelSpec& spec) const;
};

}  // namespace skewnow
