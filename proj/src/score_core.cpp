#include "micsel/score_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace micsel {

double ScoreModel::w_param_gradient(std::span<const double>, std::span<const double>, std::span<double>) const {
    throw ContractError(name() + " has no analytic parameter gradient");
}

std::vector<double> ScoreModel::grad_log(std::span<const double> obs, std::span<const double> params) const {
    std::vector<double> g(obs_dim());
    scores(obs, params, g);
    return g;
}

double ScoreModel::laplacian_log(std::span<const double> obs, std::span<const double> params) const {
    std::vector<double> g(obs_dim());
    return scores(obs, params, g);
}

namespace {

void check_params(const ScoreModel& model, std::span<const double> params) {
    if (params.size() != model.param_dim()) {
        throw ContractError(model.name() + ": expected " + std::to_string(model.param_dim()) +
                            " parameters, got " + std::to_string(params.size()));
    }
}

void check_kind(const Dataset& data, const ScoreModel& model) {
    if (data.kind() != model.data_kind()) {
        throw ContractError(model.name() + " expects " + std::string(to_string(model.data_kind())) +
                            " data, got " + std::string(to_string(data.kind())));
    }
    if (data.kind() != DataKind::timeseries && data.width() != model.obs_length()) {
        throw ContractError(model.name() + ": observation width mismatch");
    }
}

WEvaluation evaluate(std::span<const double> obs, const ScoreModel& model, std::span<const double> params,
                     std::span<double> grad, std::size_t index) {
    const double lap = model.scores(obs, params, grad);
    double gns = 0.0;
    for (double g : grad) gns += g * g;
    if (!std::isfinite(gns) || !std::isfinite(lap)) {
        throw EvaluationError("non-finite score at observation " +
                                  (index == kNoIndex ? std::string("?") : std::to_string(index)),
                              index);
    }
    return WEvaluation::from_parts(gns, lap);
}

GicValue average_w(const Dataset& data, const ScoreModel& model, std::span<const double> params,
                   std::size_t truncation_l) {
    std::vector<double> grad(model.obs_dim());
    double sum = 0.0;
    visit_observations(data, model, truncation_l, [&](std::size_t i, std::span<const double> obs) {
        sum += evaluate(obs, model, params, grad, i).w;
    });
    const std::size_t n = data.size() - truncation_l;
    return {sum / static_cast<double>(n), n, truncation_l};
}

}  // namespace

WEvaluation w_objective(std::span<const double> obs, const ScoreModel& model, std::span<const double> params,
                        std::size_t index) {
    check_params(model, params);
    if (obs.size() != model.obs_length()) throw ContractError(model.name() + ": observation length mismatch");
    std::vector<double> grad(model.obs_dim());
    return evaluate(obs, model, params, grad, index);
}

GicValue gic(const Dataset& data, const ScoreModel& model, std::span<const double> params) {
    if (data.kind() == DataKind::timeseries) throw ContractError("gic: use cgic for time series");
    check_kind(data, model);
    check_params(model, params);
    return average_w(data, model, params, 0);
}

GicValue cgic(const Dataset& data, const ScoreModel& model, std::span<const double> params,
              std::size_t truncation_l) {
    if (data.kind() != DataKind::timeseries) throw ContractError("cgic needs a time series");
    check_kind(data, model);
    check_params(model, params);
    if (truncation_l >= data.size()) {
        throw InvalidWindowError("truncation " + std::to_string(truncation_l) + " leaves no observations out of " +
                                 std::to_string(data.size()));
    }
    if (truncation_l < model.markov_order()) {
        throw ContractError("truncation must be at least the model's Markov order");
    }
    return average_w(data, model, params, truncation_l);
}

std::size_t resolve_truncation(const Dataset& data, const ScoreModel& model,
                               std::optional<std::size_t> truncation_l) {
    if (data.kind() != DataKind::timeseries) return 0;
    const std::size_t l = truncation_l.value_or(model.markov_order());
    if (l >= data.size()) throw InvalidWindowError("truncation leaves an empty window");
    if (l < model.markov_order()) throw ContractError("truncation must be at least the model's Markov order");
    return l;
}

GicValue sample_gic(const Dataset& data, const ScoreModel& model, std::span<const double> params,
                    std::optional<std::size_t> truncation_l) {
    if (data.kind() == DataKind::timeseries) {
        return cgic(data, model, params, truncation_l.value_or(model.markov_order()));
    }
    return gic(data, model, params);
}

double default_fd_step(double x) {
    static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
    return base * (1.0 + std::abs(x));
}

FdReport fd_score_check(const ScoreModel& model, std::span<const double> params, std::span<const double> obs,
                        std::optional<double> step) {
    check_params(model, params);
    if (obs.size() != model.obs_length()) throw ContractError(model.name() + ": observation length mismatch");

    std::vector<double> grad(model.obs_dim());
    const double lap = model.scores(obs, params, grad);

    std::vector<double> x(obs.begin(), obs.end());
    const std::size_t off = model.response_offset();
    const double f0 = model.log_unnorm(x, params);
    auto f_at = [&](std::size_t j, double delta) {
        const double saved = x[off + j];
        x[off + j] = saved + delta;
        const double f = model.log_unnorm(x, params);
        x[off + j] = saved;
        return f;
    };

    FdReport report;
    double lap_fd = 0.0;
    for (std::size_t j = 0; j < model.obs_dim(); ++j) {
        const double xj = x[off + j];
        const double h = (step && *step > 0.0) ? *step : default_fd_step(xj);
        const double g_fd = (f_at(j, h) - f_at(j, -h)) / (2.0 * h);
        report.grad_err = std::max(report.grad_err, std::abs(g_fd - grad[j]) / std::max(1.0, std::abs(grad[j])));

        // Second differences lose ~eps/h^2, so they get their own wider step
        // and one Richardson extrapolation.
        const double h2 = 1e-3 * (1.0 + std::abs(xj));
        auto second = [&](double hh) { return (f_at(j, hh) - 2.0 * f0 + f_at(j, -hh)) / (hh * hh); };
        lap_fd += (4.0 * second(0.5 * h2) - second(h2)) / 3.0;
    }
    report.lap_err = std::abs(lap_fd - lap) / std::max(1.0, std::abs(lap));
    return report;
}

FisherDivergenceEstimate mc_fisher_divergence(BoundModel p, BoundModel q, const Dataset& sample) {
    if (p.model.obs_dim() != q.model.obs_dim() || p.model.data_kind() != q.model.data_kind()) {
        throw ContractError("fisher divergence: models disagree on the observation space");
    }
    check_kind(sample, p.model);
    check_params(p.model, p.params);
    check_params(q.model, q.params);
    const std::size_t lags = std::max(p.model.markov_order(), q.model.markov_order());
    if (p.model.markov_order() != q.model.markov_order()) {
        throw ContractError("fisher divergence: models disagree on Markov order");
    }

    std::vector<double> gp(p.model.obs_dim()), gq(q.model.obs_dim());
    double sum_div = 0.0, sum_r = 0.0, sum_r2 = 0.0;
    std::size_t n = 0;
    visit_observations(sample, p.model, lags, [&](std::size_t i, std::span<const double> obs) {
        const WEvaluation wp = evaluate(obs, p.model, p.params, gp, i);
        const WEvaluation wq = evaluate(obs, q.model, q.params, gq, i);
        double d = 0.0;
        for (std::size_t j = 0; j < gp.size(); ++j) d += (gp[j] - gq[j]) * (gp[j] - gq[j]);
        const double r = wp.w - wq.w - d;
        sum_div += d;
        sum_r += r;
        sum_r2 += r * r;
        ++n;
    });
    const double nn = static_cast<double>(n);
    FisherDivergenceEstimate out;
    out.divergence = sum_div / nn;
    const double mean_r = sum_r / nn;
    out.identity_residual = std::abs(mean_r);
    const double var_r = n > 1 ? std::max(0.0, (sum_r2 - nn * mean_r * mean_r) / (nn - 1.0)) : 0.0;
    out.residual_standard_error = std::sqrt(var_r / nn);
    return out;
}

}  // namespace micsel
