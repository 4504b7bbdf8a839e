#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace micsel {

/// Smooth objective to minimize. Writes the gradient when `grad` is non-empty
/// and returns the value; a non-finite return marks an infeasible point.
using ObjectiveFn = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct AdamConfig {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int max_iter = 5000;
    /// Stop once the largest coordinate update falls below this.
    double tol = 1e-6;
    /// Rejected (non-finite) steps halve the learning rate at most this often.
    int max_halvings = 20;
};

struct BfgsConfig {
    double grad_tol = 1e-6;
    int max_iter = 500;
    /// Trial steps allowed per line search before giving up.
    int max_line_search = 40;
    double c1 = 1e-4;
    double c2 = 0.1;
    /// Largest max-norm move per iteration; unlimited by default.
    double max_step = std::numeric_limits<double>::infinity();
};

struct OptimResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string message;
    /// Objective after each accepted iteration (best-so-far for Adam).
    std::vector<double> trace;
};

/// Throws OptimizationError when the objective is not finite at x0.
OptimResult adam_minimize(const ObjectiveFn& f, std::vector<double> x0, const AdamConfig& cfg);

/// Quasi-Newton with a strong-Wolfe line search. Throws OptimizationError
/// when the objective is not finite at x0.
OptimResult bfgs_minimize(const ObjectiveFn& f, std::vector<double> x0, const BfgsConfig& cfg);

}  // namespace micsel
