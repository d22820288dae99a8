#pragma once

// Quasi score-driven recursion for the bivariate mixed-frequency model.
//
// Each month t the predicted state z_t is mapped to AST parameters for both
// series (link_parameters), the score of the independence log density is
// scaled by the inverse diagonal information (quasi_score), and the state is
// updated and propagated (step):
//
//   z_{t|t}  = z_t + D s_t
//   z_{t+1}  = B z_{t|t} + A s_t
//
// A is non-zero only for the location common factor, whose transition entry
// is zero by default; every other slot propagates through B alone.
//
// Quarterly quantities (GDP always, the related series when it is rolling
// quarterly) aggregate five monthly values with weights 1/3, 2/3, 1, 2/3, 1/3.
// The four lagged monthly values are taken from filtered states.

#include "ast.hpp"
#include "modelspec.hpp"
#include "panel.hpp"
#include "parameters.hpp"

#include <array>
#include <optional>
#include <vector>

namespace skewnow {

inline constexpr std::array<double, 5> kAggregationWeights = {1.0 / 3.0, 2.0 / 3.0, 1.0, 2.0 / 3.0, 1.0 / 3.0};

/// Filtered monthly values for t-1..t-4 (index 0 is t-1), per series.
struct LagBuffers {
    std::array<std::array<double, 4>, 2> location{};
    std::array<std::array<double, 4>, 2> log_scale{};

    void push(const std::array<double, 2>& loc, const std::array<double, 2>& log_scale_now);
    /// Buffers holding the same value in every lag.
    static LagBuffers replicate(const std::array<double, 2>& loc, const std::array<double, 2>& log_scale_now);
};

/// d(mu, sigma, alpha)/dz for one series; rows are mu, sigma, alpha.
using LinkJacobian = std::array<StateVector, 3>;

struct LinkedParameters {
    std::array<ASTParams, 2> params;
    std::array<LinkJacobian, 2> jacobian{};
};

/// Monthly (non-aggregated) location of each series implied by z.
std::array<double, 2> monthly_locations(const StateVector& z, const ModelParameters& theta);
/// Monthly log-scale of each series implied by z.
std::array<double, 2> monthly_log_scales(const StateVector& z, const ModelParameters& theta);

/// Maps a state plus lag history to both series' AST parameters and the
/// analytic Jacobian of the links. Jacobian columns of non-dynamic slots are zero.
LinkedParameters link_parameters(const StateVector& z, const ModelParameters& theta, const ModelSpec& spec,
                                 const LagBuffers& lags);

struct Observation {
    std::array<double, 2> y{};
    std::array<bool, 2> observed{};
};

struct ScoredStep {
    StateVector raw_score{};
    StateVector scaling{};
    StateVector scaled_score{};
    std::array<double, 2> loglik_contribs{};
    double copula_contrib = 0.0;
};

/// Masked score, inverse diagonal information and log-likelihood pieces at
/// the linked parameters. The copula enters the likelihood only.
ScoredStep quasi_score(const Observation& obs, const LinkedParameters& linked, const CopulaSpec& copula);

struct StepResult {
    StateVector filtered{};
    StateVector predicted{};
};

StepResult step(const StateVector& z, const ScoredStep& scored, const TransitionSpec& trans);

/// Incremental filter; copyable so simulation paths can branch from a common
/// prefix.
class Recursion {
public:
    Recursion(const ModelSpec& spec, const ModelParameters& theta);

    /// Parameters for the current (not yet observed) period.
    const LinkedParameters& predicted() const { return current_; }
    const StateVector& state() const { return z_; }

    /// Consumes one period and advances to the next.
    ScoredStep advance(const Observation& obs);

    /// After advance(): the filtered state of the period just consumed and the
    /// AST parameters it implies (the nowcast parameters for that period).
    const StateVector& filtered_state() const { return filtered_; }
    std::array<ASTParams, 2> filtered_params() const;

    const ModelSpec& spec() const { return spec_; }
    const ModelParameters& theta() const { return theta_; }

private:
    ModelSpec spec_;
    ModelParameters theta_;
    TransitionSpec trans_;
    StateVector z_{};
    StateVector filtered_{};
    LagBuffers lags_;
    LagBuffers lags_before_;
    LinkedParameters current_;
};

struct FilterResult {
    std::vector<StateVector> predicted_states;
    std::vector<StateVector> filtered_states;
    std::vector<std::array<ASTParams, 2>> predicted_params;
    std::vector<std::array<ASTParams, 2>> filtered_params;
    std::vector<std::array<double, 2>> loglik_marginal;  // zero where unobserved
    std::vector<double> loglik_copula;
    std::vector<StateVector> scaled_scores;
    std::optional<std::size_t> first_nonfinite;

    double total_loglik() const;
    double marginal_loglik(int series) const;
    double copula_loglik() const;
};

FilterResult run_filter(const ObservationPanel& panel, const ModelParameters& theta, const ModelSpec& spec);

/// Weighted objective sum_t [d1 log f1 + d1 d2 log c + W d2 log f2] in one
/// pass without storing paths; -infinity when any term is not finite.
double filter_weighted_loglik(const ObservationPanel& panel, const ModelParameters& theta, const ModelSpec& spec);

Observation observation_at(const ObservationPanel& panel, std::size_t t);

}  // namespace skewnow
