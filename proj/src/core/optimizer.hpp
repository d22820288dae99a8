#pragma once

// Quasi-Newton minimiser with finite-difference gradients.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace skewnow {

struct OptimizerOptions {
    std::size_t max_iterations = 2000;
    /// Stop once the relative improvement stays below this twice in a row.
    double relative_tolerance = 1e-8;
    double gradient_step = 1e-5;
    /// Largest allowed change of any coordinate in one line search.
    double max_step = 2.0;
};

struct OptimizerResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    std::string message;
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Minimises `f` by BFGS with central-difference gradients and Armijo
/// backtracking. Non-finite values are treated as +infinity.
OptimizerResult bfgs_minimize(const Objective& f, std::vector<double> x0, const OptimizerOptions& options = {});

}  // namespace skewnow
