#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "micsel/dataset.hpp"
#include "micsel/optimize.hpp"
#include "micsel/score_core.hpp"
#include "micsel/score_model.hpp"

namespace micsel {

enum class OptimizerKind { adam, bfgs };

std::string_view to_string(OptimizerKind k);

struct FitOptions {
    OptimizerKind optimizer = OptimizerKind::bfgs;
    AdamConfig adam;
    BfgsConfig bfgs;
    /// Time series only; defaults to the model's Markov order.
    std::optional<std::size_t> truncation_l;
    /// Use the family's closed-form parameter gradient when it has one.
    bool analytic_gradient = true;
};

struct FitResult {
    std::vector<double> params_hat;   // reported scale (angles wrapped)
    std::vector<double> internal_hat; // optimizer coordinates
    GicValue gic_at_opt;
    int iterations = 0;
    bool converged = false;
    bool at_boundary = false;
    OptimizerKind optimizer = OptimizerKind::bfgs;
    std::vector<double> init_used;
    std::string message;
};

// Sample GIC (or CGIC) as a function of the optimizer coordinates.
class GicObjective {
public:
    GicObjective(const Dataset& data, const ScoreModel& model, std::optional<std::size_t> truncation_l,
                 bool analytic_gradient = true);

    const ConstraintMap& constraints() const noexcept { return constraints_; }
    std::size_t truncation() const noexcept { return truncation_l_; }
    std::size_t n_effective() const noexcept { return data_.size() - truncation_l_; }
    bool analytic() const noexcept { return analytic_; }

    /// GIC at internal point z; NaN when a score is not finite.
    double value(std::span<const double> z) const;
    /// GIC at z and its gradient with respect to z.
    double value_and_gradient(std::span<const double> z, std::span<double> grad) const;

    /// Objective for minimizers: -GIC.
    ObjectiveFn negated() const;

private:
    const Dataset& data_;
    const ScoreModel& model_;
    ConstraintMap constraints_;
    std::size_t truncation_l_;
    bool analytic_;
};

FitResult mgice_adam(const Dataset& data, const ScoreModel& model, std::span<const double> init,
                     const AdamConfig& cfg = {}, std::optional<std::size_t> truncation_l = std::nullopt,
                     bool analytic_gradient = true);

FitResult mgice_bfgs(const Dataset& data, const ScoreModel& model, std::span<const double> init,
                     const BfgsConfig& cfg = {}, std::optional<std::size_t> truncation_l = std::nullopt,
                     bool analytic_gradient = true);

FitResult mgice(const Dataset& data, const ScoreModel& model, std::span<const double> init, const FitOptions& opts);

enum class FamilyTag { baker, ar_baker, poly_baker, vonmises_m1, vonmises_m2, gaussian_location };

// k = 1 sits below the default ShapeBounds::k_min, so k starts at 2.
struct InitOptions {
    double alpha = 0.25;
    double k = 2.0;
};

/// Starting values (reported scale). Baker-type families start from moment or
/// least-squares fits; von Mises starts at zero with concentrations at 1e-3.
std::vector<double> default_init(const Dataset& data, FamilyTag family, std::size_t order = 1,
                                 const InitOptions& opts = {});

/// Conditional least-squares AR(p) fit: returns (a_1..a_p, intercept, residual sd).
std::vector<double> least_squares_ar(std::span<const double> series, std::size_t order);

/// Least-squares polynomial fit: returns (beta_1..beta_p, intercept, residual sd).
std::vector<double> least_squares_poly(std::span<const double> x, std::span<const double> y, std::size_t degree);

}  // namespace micsel
