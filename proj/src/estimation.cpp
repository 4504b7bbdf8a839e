#include "micsel/estimation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>

#include "micsel/errors.hpp"

namespace micsel {

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "bfgs"; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kBoundaryLog = std::log(1e-8);

}  // namespace

GicObjective::GicObjective(const Dataset& data, const ScoreModel& model, std::optional<std::size_t> truncation_l,
                           bool analytic_gradient)
    : data_(data),
      model_(model),
      constraints_(model.constraints()),
      truncation_l_(resolve_truncation(data, model, truncation_l)),
      analytic_(analytic_gradient && model.has_param_gradient()) {
    if (data.kind() != model.data_kind()) throw ContractError(model.name() + ": data kind mismatch");
}

double GicObjective::value(std::span<const double> z) const {
    const std::vector<double> theta = constraints_.to_model(z);
    try {
        return sample_gic(data_, model_, theta, truncation_l_).value;
    } catch (const EvaluationError&) {
        return kNaN;
    }
}

double GicObjective::value_and_gradient(std::span<const double> z, std::span<double> grad) const {
    const std::size_t h = z.size();
    if (!analytic_) {
        const double v = value(z);
        std::vector<double> zz(z.begin(), z.end());
        for (std::size_t j = 0; j < h; ++j) {
            const double step = default_fd_step(zz[j]);
            const double saved = zz[j];
            zz[j] = saved + step;
            const double up = value(zz);
            zz[j] = saved - step;
            const double dn = value(zz);
            zz[j] = saved;
            grad[j] = (up - dn) / (2.0 * step);
        }
        return v;
    }

    std::vector<double> theta = constraints_.to_model(z);
    std::vector<double> dw(h), acc(h, 0.0);
    double sum = 0.0;
    visit_observations(data_, model_, truncation_l_, [&](std::size_t, std::span<const double> obs) {
        sum += model_.w_param_gradient(obs, theta, dw);
        for (std::size_t j = 0; j < h; ++j) acc[j] += dw[j];
    });
    const double n = static_cast<double>(data_.size() - truncation_l_);
    for (std::size_t j = 0; j < h; ++j) grad[j] = acc[j] / n * constraints_.jacobian(j, z[j]);
    return sum / n;
}

ObjectiveFn GicObjective::negated() const {
    return [this](std::span<const double> z, std::span<double> grad) {
        if (grad.empty()) return -value(z);
        const double v = value_and_gradient(z, grad);
        for (double& g : grad) g = -g;
        return -v;
    };
}

namespace {

FitResult finish_fit(const Dataset& data, const ScoreModel& model, const GicObjective& obj, const OptimResult& opt,
                     std::span<const double> init, OptimizerKind kind) {
    FitResult fit;
    fit.internal_hat = opt.x;
    std::vector<double> theta = obj.constraints().to_model(opt.x);
    model.canonicalize(theta);
    fit.params_hat = obj.constraints().report(theta);
    fit.gic_at_opt = sample_gic(data, model, theta, obj.truncation());
    fit.iterations = opt.iterations;
    fit.converged = opt.converged;
    fit.optimizer = kind;
    fit.init_used.assign(init.begin(), init.end());
    fit.message = opt.message;
    for (std::size_t j = 0; j < opt.x.size(); ++j) {
        if (obj.constraints().tag(j) == Transform::log_positive && opt.x[j] < kBoundaryLog) {
            fit.at_boundary = true;
            fit.converged = false;
            fit.message += "; coordinate " + std::to_string(j) + " collapsed towards zero";
        }
    }
    return fit;
}

std::vector<double> start_point(const GicObjective& obj, const ScoreModel& model, std::span<const double> init) {
    if (init.size() != model.param_dim()) {
        throw ContractError(model.name() + ": init has length " + std::to_string(init.size()) + ", expected " +
                            std::to_string(model.param_dim()));
    }
    std::vector<double> z;
    try {
        z = obj.constraints().to_internal(init);
    } catch (const ContractError& e) {
        throw InitializationError(std::string("invalid initial value: ") + e.what());
    }
    if (!std::isfinite(obj.value(z))) throw InitializationError(model.name() + ": GIC is not finite at the initial value");
    return z;
}

}  // namespace

FitResult mgice_adam(const Dataset& data, const ScoreModel& model, std::span<const double> init,
                     const AdamConfig& cfg, std::optional<std::size_t> truncation_l, bool analytic_gradient) {
    const GicObjective obj(data, model, truncation_l, analytic_gradient);
    std::vector<double> z0 = start_point(obj, model, init);
    OptimResult opt;
    try {
        opt = adam_minimize(obj.negated(), std::move(z0), cfg);
    } catch (const OptimizationError& e) {
        throw InitializationError(e.what());
    }
    return finish_fit(data, model, obj, opt, init, OptimizerKind::adam);
}

FitResult mgice_bfgs(const Dataset& data, const ScoreModel& model, std::span<const double> init,
                     const BfgsConfig& cfg, std::optional<std::size_t> truncation_l, bool analytic_gradient) {
    const GicObjective obj(data, model, truncation_l, analytic_gradient);
    std::vector<double> z0 = start_point(obj, model, init);
    OptimResult opt;
    try {
        opt = bfgs_minimize(obj.negated(), std::move(z0), cfg);
    } catch (const OptimizationError& e) {
        throw InitializationError(e.what());
    }
    return finish_fit(data, model, obj, opt, init, OptimizerKind::bfgs);
}

FitResult mgice(const Dataset& data, const ScoreModel& model, std::span<const double> init, const FitOptions& opts) {
    if (opts.optimizer == OptimizerKind::adam) {
        return mgice_adam(data, model, init, opts.adam, opts.truncation_l, opts.analytic_gradient);
    }
    return mgice_bfgs(data, model, init, opts.bfgs, opts.truncation_l, opts.analytic_gradient);
}

// --- initial values --------------------------------------------------------

namespace {

std::pair<double, double> mean_sd(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

std::vector<double> solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) throw InitializationError("least-squares design is rank deficient");
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const double dof = static_cast<double>(X.rows() - X.cols());
    const double sd = std::sqrt(resid.squaredNorm() / std::max(1.0, dof));
    std::vector<double> out(beta.data(), beta.data() + beta.size());
    out.push_back(sd);
    return out;
}

}  // namespace

std::vector<double> least_squares_ar(std::span<const double> series, std::size_t order) {
    if (order == 0) throw ContractError("AR order must be at least 1");
    if (series.size() < 2 * order + 2) throw InitializationError("series too short for the requested AR order");
    const std::size_t rows = series.size() - order;
    Eigen::MatrixXd X(rows, order + 1);
    Eigen::VectorXd y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + order;
        for (std::size_t j = 1; j <= order; ++j) X(r, j - 1) = series[t - j];
        X(r, order) = 1.0;
        y(r) = series[t];
    }
    return solve_least_squares(X, y);
}

std::vector<double> least_squares_poly(std::span<const double> x, std::span<const double> y, std::size_t degree) {
    if (degree == 0) throw ContractError("polynomial degree must be at least 1");
    if (x.size() != y.size()) throw ContractError("x and y lengths differ");
    if (x.size() < degree + 2) throw InitializationError("too few points for the requested degree");
    Eigen::MatrixXd X(x.size(), degree + 1);
    Eigen::VectorXd yy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double xp = 1.0;
        for (std::size_t j = 0; j < degree; ++j) {
            xp *= x[i];
            X(i, j) = xp;
        }
        X(i, degree) = 1.0;
        yy(i) = y[i];
    }
    return solve_least_squares(X, yy);
}

std::vector<double> default_init(const Dataset& data, FamilyTag family, std::size_t order, const InitOptions& opts) {
    switch (family) {
        case FamilyTag::baker: {
            if (data.kind() != DataKind::unconditional || data.width() != 1) {
                throw ContractError("Baker init needs univariate data");
            }
            const auto [mean, sd] = mean_sd(data.values());
            if (!(sd > 0.0)) throw InitializationError("data have zero variance");
            return {mean, sd, opts.alpha, opts.k};
        }
        case FamilyTag::ar_baker: {
            if (data.kind() != DataKind::timeseries) throw ContractError("AR init needs a time series");
            const auto [mean, sd] = mean_sd(data.values());
            if (!(sd > 0.0)) throw InitializationError("series has zero variance");
            std::vector<double> ls = least_squares_ar(data.values(), order);
            if (!(ls.back() > 0.0)) throw InitializationError("AR residuals have zero variance");
            std::vector<double> init(ls.begin(), ls.begin() + static_cast<std::ptrdiff_t>(order));
            init.insert(init.end(), {mean, ls.back(), opts.alpha, opts.k});
            return init;
        }
        case FamilyTag::poly_baker: {
            if (data.kind() != DataKind::regression) throw ContractError("polynomial init needs regression data");
            const std::vector<double> x = data.column(0), y = data.column(1);
            if (!(mean_sd(y).second > 0.0)) throw InitializationError("response has zero variance");
            std::vector<double> ls = least_squares_poly(x, y, order);
            if (!(ls.back() > 0.0)) throw InitializationError("polynomial residuals have zero variance");
            ls.insert(ls.end(), {opts.alpha, opts.k});
            return ls;
        }
        case FamilyTag::vonmises_m1: return {1e-3, 1e-3, 0.0, 0.0};
        case FamilyTag::vonmises_m2: return {1e-3, 1e-3, 0.0, 0.0, 0.0};
        case FamilyTag::gaussian_location: {
            return {mean_sd(data.values()).first};
        }
    }
    throw ContractError("unknown family");
}

}  // namespace micsel
