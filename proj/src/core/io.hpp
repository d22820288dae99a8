#pragma once

// JSON and CSV artifacts shared by the CLI and the C interface.

#include "evaluation.hpp"

#include <filesystem>
#include <string>

namespace skewnow {

std::string fit_to_json(const FitResult& fit);
FitResult fit_from_json(const std::string& text);
void write_fit_json(const std::filesystem::path& path, const FitResult& fit);
FitResult read_fit_json(const std::filesystem::path& path);

std::string spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const std::string& text);

/// month,state,predicted,filtered for every state slot.
void write_states_csv(const std::filesystem::path& path, const ObservationPanel& panel, const FilterResult& fr);
/// month,series,location,scale,shape of the one-step-ahead parameters.
void write_params_csv(const std::filesystem::path& path, const ObservationPanel& panel, const FilterResult& fr);
/// month,state,scaled_score.
void write_scores_csv(const std::filesystem::path& path, const ObservationPanel& panel, const FilterResult& fr);

/// x,density.
void write_density_csv(const std::filesystem::path& path, const DensityNowcast& d);
std::string nowcast_summary_json(const DensityNowcast& d);
void write_nowcast_json(const std::filesystem::path& path, const DensityNowcast& d);

/// quarter,step,mean,lo90,hi90,realized for one model of a backtest.
void write_fan_chart_csv(const std::filesystem::path& path, const std::vector<BacktestEntry>& entries,
                         const std::string& model);

/// Simulated panel as the aligned observations: month,gdp,related with empty
/// cells where a series is not observed.
void write_panel_csv(const std::filesystem::path& path, const ObservationPanel& panel);

}  // namespace skewnow
