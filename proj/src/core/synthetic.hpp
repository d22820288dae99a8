#pragma once

// Panels simulated from the model's own recursion.

#include "data.hpp"
#include "dynamics.hpp"

#include <cstdint>
#include <vector>

namespace skewnow {

struct SimulationConfig {
    ModelParameters theta;
    ModelSpec spec;
    std::size_t length = 600;  // months
    std::uint64_t seed = 0;
    YearMonth start{1970, 1};
};

struct SimulationResult {
    ObservationPanel panel;
    std::vector<StateVector> predicted_states;  // z_t used to draw y_t
    std::vector<std::array<ASTParams, 2>> params;
};

/// Draws y_t from the copula-coupled conditional density at z_t and updates
/// with the filter. GDP is drawn at quarter-end months only; a rolling
/// quarterly related series starts in the fourth month. Throws
/// std::runtime_error when a state exceeds 1e6 in magnitude.
SimulationResult simulate_panel(const SimulationConfig& cfg);

/// Parameters of the form used by the recovery experiments: moderate gains,
/// persistent common scale factor, Gaussian copula.
ModelParameters reference_parameters(const ModelSpec& spec);

struct PseudoVintage {
    std::string as_of;
    Quarter target;
    int step = 0;
    ObservationPanel panel;
};

/// Four truncated panels (steps 4..1) per scheduled target quarter. Throws
/// std::invalid_argument when a target falls outside the panel.
std::vector<PseudoVintage> make_pseudo_vintages(const ObservationPanel& panel, const std::vector<Quarter>& schedule);

/// Converts growth rates back to levels (base 100) so the panel can be written
/// as a vintage. GDP levels start one quarter before the first observed GDP
/// growth; related levels cover the whole grid (three base months for a
/// rolling quarterly series).
Vintage panel_to_vintage(const ObservationPanel& panel, const std::string& as_of);

}  // namespace skewnow
