#pragma once

// Weighted maximum likelihood for the bivariate model.

#include "dynamics.hpp"
#include "optimizer.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace skewnow {

enum class Transform {
    identity,
    exp,        // positive gains
    tanh,       // AR coefficients and copula dependence
    exp_floor,  // floor + exp(x): tails and copula dof
};

/// One free coordinate of the optimisation vector.
struct FreeParameter {
    std::string name;
    Transform transform = Transform::identity;
    double floor = 0.0;
    std::function<double(const ModelParameters&)> get;
    std::function<void(ModelParameters&, double)> set;
};

inline constexpr double kTailFloor = 2.1;
inline constexpr double kCopulaDofFloor = 0.1;

/// Maps between the natural ModelParameters and the unconstrained vector the
/// optimiser works on. Fixed quantities (GDP loadings, common-factor initial
/// values, inactive slots, W, the copula family) stay in the template.
class ParameterLayout {
public:
    ParameterLayout(const ModelSpec& spec, CopulaFamily copula);

    std::size_t size() const { return entries_.size(); }
    const std::vector<FreeParameter>& entries() const { return entries_; }
    std::vector<std::string> names() const;

    std::vector<double> to_free(const ModelParameters& theta) const;
    ModelParameters to_natural(const std::vector<double>& x, ModelParameters base) const;

    static double forward(Transform t, double floor, double natural);
    static double inverse(Transform t, double floor, double free);

private:
    std::vector<FreeParameter> entries_;
};

/// Mechanical count of free parameters for a spec and copula family.
std::size_t count_parameters(const ModelSpec& spec, CopulaFamily copula);

/// sum_t [d1 log f1 + d1 d2 log c + W d2 log f2]; -infinity when not finite.
double weighted_loglik(const ModelParameters& theta, const ObservationPanel& panel, const ModelSpec& spec);

struct EstimationConfig {
    std::size_t starts = 5;
    std::size_t max_iterations = 2000;
    double relative_tolerance = 1e-8;
    double weight = 1.0 / 3.0;
    CopulaFamily copula = CopulaFamily::student_t;
    std::uint64_t seed = 0;
    /// Used as the first start when present.
    std::optional<ModelParameters> warm_start;
};

struct StartRecord {
    std::size_t index = 0;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::string message;
};

struct FitResult {
    ModelSpec spec;
    ModelParameters estimate;
    double objective = 0.0;  // weighted log likelihood at the optimum
    double total_loglik = 0.0;
    double independence_loglik = 0.0;
    double gdp_loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::size_t n_params = 0;
    std::size_t n_obs = 0;
    bool converged = false;
    std::size_t iterations = 0;
    std::string status;
    std::vector<StartRecord> starts;
    std::vector<std::string> parameter_names;
    std::vector<double> parameter_values;  // natural units, same order as names
};

struct InformationCriteria {
    double aic = 0.0;
    double bic = 0.0;
};

InformationCriteria information_criteria(double loglik, std::size_t p, std::size_t n);

/// Data-driven starting values: sample locations and robust scales of both
/// series, neutral shapes, all gains set to `gain`.
ModelParameters default_start(const ObservationPanel& panel, const ModelSpec& spec, const EstimationConfig& config,
                              double gain);

/// Fills the likelihood summaries of a FitResult for fixed parameters.
FitResult summarize_fit(const ObservationPanel& panel, const ModelSpec& spec, const ModelParameters& theta);

/// Multi-start weighted ML. Throws std::runtime_error with per-start
/// diagnostics if no start yields a finite objective.
FitResult estimate(const ObservationPanel& panel, const ModelSpec& spec, const EstimationConfig& config);

}  // namespace skewnow
