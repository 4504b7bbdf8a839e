#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "micsel/dataset.hpp"
#include "micsel/errors.hpp"
#include "micsel/score_model.hpp"

namespace micsel {

struct WEvaluation {
    double w = 0.0;
    double grad_norm_sq = 0.0;
    double laplacian = 0.0;

    static WEvaluation from_parts(double grad_norm_sq, double laplacian) {
        return {-grad_norm_sq - 2.0 * laplacian, grad_norm_sq, laplacian};
    }
};

struct GicValue {
    double value = 0.0;
    std::size_t n_effective = 0;
    std::size_t truncation_l = 0;

    std::size_t n_raw() const noexcept { return n_effective + truncation_l; }
};

/// W(x, p) = -|grad_x log p|^2 - 2 lap_x log p.
WEvaluation w_objective(std::span<const double> obs, const ScoreModel& model,
                        std::span<const double> params, std::size_t index = kNoIndex);

/// Sample mean of W over an unconditional or regression data set.
GicValue gic(const Dataset& data, const ScoreModel& model, std::span<const double> params);

/// Conditional GIC averaging W(x_t | lags) over t = L+1..N (1-based).
GicValue cgic(const Dataset& data, const ScoreModel& model, std::span<const double> params,
              std::size_t truncation_l);

/// Dispatches to gic or cgic. For time series `truncation_l` defaults to the
/// model's Markov order.
GicValue sample_gic(const Dataset& data, const ScoreModel& model, std::span<const double> params,
                    std::optional<std::size_t> truncation_l = std::nullopt);

/// Resolves and validates the truncation used for `data` under `model`.
std::size_t resolve_truncation(const Dataset& data, const ScoreModel& model,
                               std::optional<std::size_t> truncation_l);

/// Calls f(index, observation_span) for every observation in the averaging window.
template <class F>
void visit_observations(const Dataset& data, const ScoreModel& model, std::size_t truncation_l, F&& f) {
    if (data.kind() == DataKind::timeseries) {
        const std::size_t lags = model.markov_order();
        for (std::size_t t = truncation_l; t < data.size(); ++t) f(t, data.window(t, lags));
    } else {
        for (std::size_t i = 0; i < data.size(); ++i) f(i, data.row(i));
    }
}

/// cbrt(machine epsilon) * (1 + |x|).
double default_fd_step(double x);

struct FdReport {
    double grad_err = 0.0;
    double lap_err = 0.0;
};

/// Compares analytic scores against central differences of log_unnorm.
/// Relative errors use the denominator max(1, |analytic|). A non-positive or
/// absent `step` selects default_fd_step per coordinate.
FdReport fd_score_check(const ScoreModel& model, std::span<const double> params,
                        std::span<const double> obs, std::optional<double> step = std::nullopt);

struct BoundModel {
    const ScoreModel& model;
    std::span<const double> params;
};

struct FisherDivergenceEstimate {
    double divergence = 0.0;
    /// |mean W(p) - mean W(q) - divergence| on the same sample.
    double identity_residual = 0.0;
    /// Monte-Carlo standard error of the residual's summands.
    double residual_standard_error = 0.0;
};

/// Monte-Carlo E_p |grad log p - grad log q|^2 over `sample` (drawn from p).
FisherDivergenceEstimate mc_fisher_divergence(BoundModel p, BoundModel q, const Dataset& sample);

}  // namespace micsel
