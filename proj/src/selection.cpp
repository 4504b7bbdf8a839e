#include "micsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "micsel/errors.hpp"
#include "micsel/models.hpp"

namespace micsel {

std::string_view to_string(MicVariant v) { return v == MicVariant::mic1 ? "mic1" : "mic2"; }

std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::mic1: return "mic1";
        case Criterion::mic2: return "mic2";
        case Criterion::gicc: return "gicc";
        case Criterion::aic: return "aic";
        case Criterion::bic: return "bic";
    }
    return "unknown";
}

Criterion parse_criterion(std::string_view s) {
    for (Criterion c : {Criterion::mic1, Criterion::mic2, Criterion::gicc, Criterion::aic, Criterion::bic}) {
        if (s == to_string(c)) return c;
    }
    throw ContractError("unknown criterion '" + std::string(s) + "'");
}

bool maximized(Criterion c) { return c == Criterion::mic1 || c == Criterion::mic2 || c == Criterion::gicc; }

double mic_factor(MicVariant v, std::size_t n_effective, std::size_t param_count) {
    const double n = static_cast<double>(n_effective);
    const double k = static_cast<double>(param_count);
    return v == MicVariant::mic1 ? std::exp(-2.0 * k / n) : std::exp(-k / n * std::log(n));
}

double mic(const GicValue& gic_val, std::size_t param_count, MicVariant v) {
    if (gic_val.n_effective < 2) throw ContractError("MIC needs at least two effective observations");
    if (param_count < 1) throw ContractError("MIC needs at least one parameter");
    return mic_factor(v, gic_val.n_effective, param_count) * gic_val.value;
}

std::vector<DivergenceRow> factor_divergence_probe(MicVariant v, std::size_t k1, std::size_t k2,
                                                   std::span<const double> n_grid) {
    if (k2 < 1 || k1 < k2) throw ContractError("factor probe needs k1 >= k2 >= 1");
    const double dk = static_cast<double>(k1) - static_cast<double>(k2);
    std::vector<DivergenceRow> rows;
    rows.reserve(n_grid.size());
    for (double n : n_grid) {
        if (!(n > 1.0)) throw ContractError("factor probe needs n > 1");
        // log C(n,k) is linear in k, so the ratio is taken in log space.
        const double log_ratio = v == MicVariant::mic1 ? -2.0 * dk / n : -dk / n * std::log(n);
        rows.push_back({n, n * log_ratio});
    }
    return rows;
}

// --- bias correction -------------------------------------------------------

namespace {

double second_step(double z) { return std::pow(std::numeric_limits<double>::epsilon(), 0.25) * (1.0 + std::abs(z)); }

// Mean gradient of W in optimizer coordinates via the closed form.
void mean_internal_gradient(const Dataset& data, const ScoreModel& model, const ConstraintMap& cm, std::size_t l,
                            std::span<const double> z, std::span<double> out) {
    const std::size_t h = z.size();
    const std::vector<double> theta = cm.to_model(z);
    std::vector<double> dw(h);
    std::fill(out.begin(), out.end(), 0.0);
    visit_observations(data, model, l, [&](std::size_t, std::span<const double> obs) {
        model.w_param_gradient(obs, theta, dw);
        for (std::size_t j = 0; j < h; ++j) out[j] += dw[j];
    });
    const double n = static_cast<double>(data.size() - l);
    for (std::size_t j = 0; j < h; ++j) out[j] = out[j] / n * cm.jacobian(j, z[j]);
}

}  // namespace

BiasEstimate estimate_bias(const Dataset& data, const ScoreModel& model, std::span<const double> internal_hat,
                           std::optional<double> fd_step, std::optional<std::size_t> truncation_l,
                           bool analytic_gradient) {
    const GicObjective obj(data, model, truncation_l, analytic_gradient);
    const ConstraintMap& cm = obj.constraints();
    const std::size_t h = model.param_dim();
    if (internal_hat.size() != h) throw ContractError("bias estimate: parameter length mismatch");
    const std::size_t l = obj.truncation();
    const std::size_t n = obj.n_effective();
    if (n <= h) throw ContractError("bias estimate needs more observations than parameters");

    std::vector<double> z(internal_hat.begin(), internal_hat.end());
    auto step1 = [&](std::size_t j) { return fd_step ? *fd_step : default_fd_step(z[j]); };
    auto step2 = [&](std::size_t j) { return fd_step ? *fd_step : second_step(z[j]); };

    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(h));
    Eigen::MatrixXd dmat = lambda;
    Eigen::VectorXd g(static_cast<Eigen::Index>(h));

    if (obj.analytic()) {
        const std::vector<double> theta = cm.to_model(z);
        std::vector<double> dw(h);
        visit_observations(data, model, l, [&](std::size_t, std::span<const double> obs) {
            model.w_param_gradient(obs, theta, dw);
            for (std::size_t j = 0; j < h; ++j) g(static_cast<Eigen::Index>(j)) = dw[j] * cm.jacobian(j, z[j]);
            lambda.selfadjointView<Eigen::Lower>().rankUpdate(g);
        });
        std::vector<double> gp(h), gm(h);
        for (std::size_t j = 0; j < h; ++j) {
            const double s = step1(j);
            const double saved = z[j];
            z[j] = saved + s;
            mean_internal_gradient(data, model, cm, l, z, gp);
            z[j] = saved - s;
            mean_internal_gradient(data, model, cm, l, z, gm);
            z[j] = saved;
            for (std::size_t i = 0; i < h; ++i) {
                dmat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (gp[i] - gm[i]) / (2.0 * s);
            }
        }
    } else {
        // Per-observation central differences of W for the outer products.
        std::vector<std::vector<double>> plus(h), minus(h);
        std::vector<double> steps(h);
        for (std::size_t j = 0; j < h; ++j) {
            steps[j] = step1(j);
            std::vector<double> zz = z;
            zz[j] = z[j] + steps[j];
            plus[j] = cm.to_model(zz);
            zz[j] = z[j] - steps[j];
            minus[j] = cm.to_model(zz);
        }
        visit_observations(data, model, l, [&](std::size_t i, std::span<const double> obs) {
            for (std::size_t j = 0; j < h; ++j) {
                const double up = w_objective(obs, model, plus[j], i).w;
                const double dn = w_objective(obs, model, minus[j], i).w;
                g(static_cast<Eigen::Index>(j)) = (up - dn) / (2.0 * steps[j]);
            }
            lambda.selfadjointView<Eigen::Lower>().rankUpdate(g);
        });
        // Second differences of the sample mean of W.
        const double f0 = obj.value(z);
        auto f_at = [&](std::size_t i, double di, std::size_t j, double dj) {
            std::vector<double> zz = z;
            zz[i] += di;
            zz[j] += dj;
            return obj.value(zz);
        };
        for (std::size_t i = 0; i < h; ++i) {
            const double si = step2(i);
            const auto ii = static_cast<Eigen::Index>(i);
            dmat(ii, ii) = (f_at(i, si, i, 0.0) - 2.0 * f0 + f_at(i, -si, i, 0.0)) / (si * si);
            for (std::size_t j = 0; j < i; ++j) {
                const double sj = step2(j);
                const double v = (f_at(i, si, j, sj) - f_at(i, si, j, -sj) - f_at(i, -si, j, sj) +
                                  f_at(i, -si, j, -sj)) /
                                 (4.0 * si * sj);
                dmat(ii, static_cast<Eigen::Index>(j)) = v;
                dmat(static_cast<Eigen::Index>(j), ii) = v;
            }
        }
    }
    lambda = lambda.selfadjointView<Eigen::Lower>();
    lambda /= static_cast<double>(n);
    dmat = 0.5 * (dmat + dmat.transpose()).eval();

    if (!lambda.allFinite() || !dmat.allFinite()) throw BiasError("non-finite derivatives in bias estimate");

    BiasEstimate est;
    est.lambda_hat = lambda;
    est.d_hat = dmat;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(dmat);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || !(smax > 0.0)) throw BiasError("averaged Hessian of W is singular");
    est.condition = smax / smin;
    est.condition_flag = est.condition > 1e10;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(dmat);
    if (!lu.isInvertible()) throw BiasError("averaged Hessian of W is singular");
    est.b_value = -(lu.solve(lambda)).trace();
    return est;
}

GiccResult gicc(const Dataset& data, const ScoreModel& model, const FitResult& fit, std::optional<double> fd_step,
                std::optional<std::size_t> truncation_l, bool analytic_gradient) {
    GiccResult out;
    out.bias = estimate_bias(data, model, fit.internal_hat, fd_step, truncation_l, analytic_gradient);
    out.criterion = static_cast<double>(fit.gic_at_opt.n_effective) * fit.gic_at_opt.value - out.bias.b_value;
    return out;
}

// --- families --------------------------------------------------------------

namespace {

std::vector<double> insert_zero(std::span<const double> params, std::size_t position) {
    std::vector<double> out(params.begin(), params.end());
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(position), 0.0);
    return out;
}

}  // namespace

ModelFamily ar_baker_family(const InitOptions& init, const ShapeBounds& bounds) {
    ModelFamily f;
    f.name = "ar-baker";
    f.tag = FamilyTag::ar_baker;
    f.build = [bounds](std::size_t order) { return std::make_unique<ArBakerModel>(order, bounds); };
    f.initial = [init](const Dataset& d, std::size_t order) { return default_init(d, FamilyTag::ar_baker, order, init); };
    f.embed = [](std::span<const double> p, std::size_t order) { return insert_zero(p, order); };
    return f;
}

ModelFamily poly_baker_family(const InitOptions& init, const ShapeBounds& bounds) {
    ModelFamily f;
    f.name = "poly-baker";
    f.tag = FamilyTag::poly_baker;
    f.build = [bounds](std::size_t order) { return std::make_unique<PolyBakerModel>(order, bounds); };
    f.initial = [init](const Dataset& d, std::size_t order) {
        return default_init(d, FamilyTag::poly_baker, order, init);
    };
    f.embed = [](std::span<const double> p, std::size_t order) { return insert_zero(p, order); };
    return f;
}

ModelFamily vonmises_family() {
    ModelFamily f;
    f.name = "vonmises";
    f.tag = FamilyTag::vonmises_m2;
    f.max_order = 2;
    f.build = [](std::size_t order) -> std::unique_ptr<ScoreModel> {
        if (order < 1 || order > 2) throw ContractError("von Mises candidates are orders 1 (m1) and 2 (m2)");
        return std::make_unique<VonMisesModel>(order == 2);
    };
    f.initial = [](const Dataset& d, std::size_t order) {
        return default_init(d, order == 2 ? FamilyTag::vonmises_m2 : FamilyTag::vonmises_m1);
    };
    f.embed = [](std::span<const double> p, std::size_t) { return insert_zero(p, p.size()); };
    return f;
}

// --- scans -----------------------------------------------------------------

std::optional<std::size_t> select_order(std::span<const CandidateResult> candidates, Criterion c) {
    std::optional<std::size_t> best;
    double best_val = 0.0;
    const bool maxim = maximized(c);
    for (const CandidateResult& cand : candidates) {
        if (cand.excluded) continue;
        const auto it = cand.values.find(c);
        if (it == cand.values.end() || !std::isfinite(it->second)) continue;
        if (!best || (maxim ? it->second > best_val : it->second < best_val)) {
            best = cand.order;
            best_val = it->second;
        }
    }
    return best;
}

namespace {

void finalize_selection(SelectionScan& scan, std::span<const Criterion> criteria) {
    for (Criterion c : criteria) {
        const auto sel = select_order(scan.candidates, c);
        if (!sel) {
            scan.warnings.push_back(std::string(to_string(c)) + ": no candidate has a finite value");
            continue;
        }
        scan.selected[c] = *sel;
    }
}

}  // namespace

SelectionScan scan_nested(const Dataset& data, const ModelFamily& family, const ScanConfig& cfg) {
    if (cfg.max_order < 1) throw ContractError("scan needs at least one candidate");
    if (family.max_order != 0 && cfg.max_order > family.max_order) {
        throw ContractError(family.name + " has at most " + std::to_string(family.max_order) + " candidates");
    }
    for (Criterion c : cfg.criteria) {
        if (c == Criterion::aic || c == Criterion::bic) {
            throw ContractError("AIC/BIC are Gaussian baselines; use aic_bic_gaussian");
        }
    }

    SelectionScan scan;
    scan.family = family.name;
    FitOptions fit_opts = cfg.fit;
    if (data.kind() == DataKind::timeseries) {
        fit_opts.truncation_l = cfg.max_order;
        scan.truncation_l = cfg.max_order;
    } else {
        fit_opts.truncation_l.reset();
    }
    const bool want_gicc = std::find(cfg.criteria.begin(), cfg.criteria.end(), Criterion::gicc) != cfg.criteria.end();

    scan.candidates.reserve(cfg.max_order);
    const FitResult* previous = nullptr;
    std::size_t previous_order = 0;
    for (std::size_t order = 1; order <= cfg.max_order; ++order) {
        CandidateResult cand;
        cand.order = order;
        std::unique_ptr<ScoreModel> model;
        try {
            model = family.build(order);
            cand.param_count = model->free_parameter_count();
            const bool chained = previous && previous_order + 1 == order;
            std::optional<FitResult> fit;
            if (cfg.warm_start && chained) {
                try {
                    const auto seed = family.embed(previous->params_hat, order - 1);
                    fit = mgice(data, *model, model->constraints().nudge_inside(seed), fit_opts);
                } catch (const InitializationError&) {
                    fit.reset();
                }
            }
            if (!fit || fit->at_boundary) {
                try {
                    FitResult cold = mgice(data, *model, family.initial(data, order), fit_opts);
                    if (!fit || !cold.at_boundary) fit = std::move(cold);
                } catch (const InitializationError&) {
                    if (!fit) throw;
                }
            }
            cand.fit = std::move(fit);
        } catch (const std::exception& e) {
            cand.excluded = true;
            cand.note = e.what();
            scan.warnings.push_back("order " + std::to_string(order) + " excluded: " + e.what());
            scan.candidates.push_back(std::move(cand));
            continue;
        }

        const FitResult& fit = *cand.fit;
        cand.gic = fit.gic_at_opt;
        if (!fit.converged) {
            scan.warnings.push_back("order " + std::to_string(order) + " did not converge: " + fit.message);
        }
        for (Criterion c : cfg.criteria) {
            if (c == Criterion::mic1) cand.values[c] = mic(cand.gic, cand.param_count, MicVariant::mic1);
            if (c == Criterion::mic2) cand.values[c] = mic(cand.gic, cand.param_count, MicVariant::mic2);
        }
        if (want_gicc) {
            try {
                GiccResult g = gicc(data, *model, fit, std::nullopt, fit_opts.truncation_l, fit_opts.analytic_gradient);
                cand.values[Criterion::gicc] = g.criterion;
                if (g.bias.condition_flag) {
                    scan.warnings.push_back("order " + std::to_string(order) +
                                            ": GICc Hessian is ill-conditioned (condition " +
                                            std::to_string(g.bias.condition) + ")");
                }
                cand.bias = std::move(g.bias);
            } catch (const std::exception& e) {
                scan.warnings.push_back("order " + std::to_string(order) + " has no GICc: " + e.what());
            }
        }
        if (previous && previous_order + 1 == order) {
            const double prev = previous->gic_at_opt.value;
            if (cand.gic.value < prev - cfg.nesting_tolerance * std::max(1.0, std::abs(prev))) {
                scan.warnings.push_back("order " + std::to_string(order) + " has lower GIC than order " +
                                        std::to_string(order - 1) + " (optimization shortfall)");
            }
        }
        scan.candidates.push_back(std::move(cand));
        previous = &*scan.candidates.back().fit;
        previous_order = order;
    }

    if (std::all_of(scan.candidates.begin(), scan.candidates.end(), [](const auto& c) { return c.excluded; })) {
        throw ScanError("every candidate fit failed");
    }
    finalize_selection(scan, cfg.criteria);
    for (const auto& [crit, order] : scan.selected) {
        if (scan.candidates[order - 1].gic.value <= 0.0) {
            scan.warnings.push_back(std::string(to_string(crit)) + ": selected candidate has non-positive GIC");
        }
    }
    return scan;
}

SelectionScan aic_bic_gaussian(const Dataset& data, std::size_t max_order) {
    if (max_order < 1) throw ContractError("scan needs at least one candidate");
    if (data.kind() == DataKind::unconditional) throw ContractError("Gaussian baselines need a series or regression data");
    if (data.size() <= max_order + 2) throw ContractError("data too short for the requested maximum order");

    SelectionScan scan;
    const bool ts = data.kind() == DataKind::timeseries;
    scan.family = ts ? "ar-gaussian" : "poly-gaussian";
    scan.truncation_l = ts ? max_order : 0;

    const std::vector<double> series = ts ? data.column(0) : std::vector<double>{};
    const std::vector<double> xs = ts ? std::vector<double>{} : data.column(0);
    const std::vector<double> ys = ts ? std::vector<double>{} : data.column(1);
    const std::size_t n = ts ? data.size() - max_order : data.size();
    const auto nn = static_cast<Eigen::Index>(n);

    for (std::size_t p = 1; p <= max_order; ++p) {
        CandidateResult cand;
        cand.order = p;
        cand.param_count = p + 2;
        Eigen::MatrixXd X(nn, static_cast<Eigen::Index>(p + 1));
        Eigen::VectorXd y(nn);
        for (std::size_t r = 0; r < n; ++r) {
            const auto rr = static_cast<Eigen::Index>(r);
            if (ts) {
                const std::size_t t = r + max_order;
                for (std::size_t j = 1; j <= p; ++j) X(rr, static_cast<Eigen::Index>(j - 1)) = series[t - j];
                y(rr) = series[t];
            } else {
                double xp = 1.0;
                for (std::size_t j = 0; j < p; ++j) {
                    xp *= xs[r];
                    X(rr, static_cast<Eigen::Index>(j)) = xp;
                }
                y(rr) = ys[r];
            }
            X(rr, static_cast<Eigen::Index>(p)) = 1.0;
        }
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        if (qr.rank() < X.cols()) {
            cand.excluded = true;
            cand.note = "rank-deficient design";
            scan.warnings.push_back("order " + std::to_string(p) + " excluded: rank-deficient design");
            scan.candidates.push_back(std::move(cand));
            continue;
        }
        const Eigen::VectorXd beta = qr.solve(y);
        const double rss = (y - X * beta).squaredNorm();
        const double dn = static_cast<double>(n);
        const double sigma2 = rss / dn;
        const double loglik = -0.5 * dn * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
        const double k = static_cast<double>(cand.param_count);
        cand.values[Criterion::aic] = 2.0 * k - 2.0 * loglik;
        cand.values[Criterion::bic] = k * std::log(dn) - 2.0 * loglik;

        FitResult fit;
        fit.params_hat.assign(beta.data(), beta.data() + p);
        double intercept = beta(static_cast<Eigen::Index>(p));
        if (ts) {
            // x_t = b0 + sum a_j x_{t-j}  =>  c = b0 / (1 - sum a_j)
            const double sum_a = beta.head(static_cast<Eigen::Index>(p)).sum();
            intercept = std::abs(1.0 - sum_a) > 1e-12 ? intercept / (1.0 - sum_a) : intercept;
        }
        fit.params_hat.push_back(intercept);
        fit.params_hat.push_back(std::sqrt(sigma2));  // (a.., c, s) like ArGaussianModel
        fit.converged = true;
        fit.message = "least squares";
        cand.fit = std::move(fit);
        cand.gic = {std::nan(""), n, scan.truncation_l};  // no GIC for a likelihood fit
        scan.candidates.push_back(std::move(cand));
    }
    if (std::all_of(scan.candidates.begin(), scan.candidates.end(), [](const auto& c) { return c.excluded; })) {
        throw ScanError("every Gaussian candidate was rank deficient");
    }
    const Criterion both[] = {Criterion::aic, Criterion::bic};
    finalize_selection(scan, both);
    return scan;
}

}  // namespace micsel
