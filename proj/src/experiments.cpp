#include "micsel/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "micsel/errors.hpp"

namespace micsel {

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::baker_fit: return "baker_fit";
        case Scenario::ar_select: return "ar_select";
        case Scenario::poly_select: return "poly_select";
        case Scenario::vonmises_select: return "vonmises_select";
        case Scenario::custom: return "custom";
    }
    return "custom";
}

Scenario parse_scenario(std::string_view s) {
    for (Scenario v : {Scenario::baker_fit, Scenario::ar_select, Scenario::poly_select, Scenario::vonmises_select,
                       Scenario::custom}) {
        if (s == to_string(v)) return v;
    }
    // Hyphenated spellings used on the command line.
    if (s == "baker-fit") return Scenario::baker_fit;
    if (s == "ar-select") return Scenario::ar_select;
    if (s == "poly-select") return Scenario::poly_select;
    if (s == "vonmises-select") return Scenario::vonmises_select;
    throw ContractError("unknown scenario '" + std::string(s) + "'");
}

ExperimentConfig scenario_defaults(Scenario s) {
    ExperimentConfig c;
    c.scenario = s;
    switch (s) {
        case Scenario::baker_fit:
            c.sample_sizes = {1000, 3000, 5000};
            c.true_params = {0.3, 0.5, 0.5, 1.5};
            c.fit.optimizer = OptimizerKind::adam;
            break;
        case Scenario::ar_select:
            c.sample_sizes = {1000, 3000, 5000};
            c.true_params = {0.5, -0.25, 0.10, 3.0, 0.5, 0.5, 1.5};
            c.max_order = 10;
            c.true_order = 3;
            c.criteria = {Criterion::gicc, Criterion::mic1, Criterion::mic2};
            break;
        case Scenario::poly_select:
            c.sample_sizes = {300, 500, 1000, 3000, 5000};
            c.true_params = {-1.5, 2.0, 5.0, 3.0, 0.5, 0.5, 1.5};
            c.max_order = 10;
            c.true_order = 3;
            c.criteria = {Criterion::gicc, Criterion::mic1, Criterion::mic2};
            c.fit.optimizer = OptimizerKind::adam;
            break;
        case Scenario::vonmises_select:
            c.sample_sizes = {300, 500, 1000};
            c.true_params = {2.0, 1.0, 1.5, 2.5, 3.0};
            c.max_order = 2;
            c.true_order = 2;
            c.criteria = {Criterion::gicc, Criterion::mic1, Criterion::mic2};
            break;
        case Scenario::custom: break;
    }
    return c;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.replications < 1) throw ContractError("replications must be at least 1");
    if (cfg.sample_sizes.empty()) throw ContractError("no sample sizes given");
    for (std::size_t n : cfg.sample_sizes) {
        if (n == 0) throw ContractError("sample sizes must be positive");
    }
    if (cfg.max_order < 1) throw ContractError("K must be at least 1");
    if (cfg.true_order < 1 || cfg.true_order > cfg.max_order) {
        throw ContractError("true order " + std::to_string(cfg.true_order) + " is outside 1.." +
                            std::to_string(cfg.max_order));
    }
    if (cfg.scenario == Scenario::custom) throw ContractError("custom scenarios have no simulator; use user data");
}

Dataset simulate_scenario(const ExperimentConfig& cfg, std::size_t n, RngStream& rng) {
    switch (cfg.scenario) {
        case Scenario::baker_fit:
            return Dataset::unconditional(1, sample_baker(n, unpack_baker(cfg.true_params), rng));
        case Scenario::ar_select: return simulate_ar_baker(n, unpack_ar_baker(cfg.true_params), rng, cfg.burn_in);
        case Scenario::poly_select:
            return simulate_poly_baker(n, cfg.design, unpack_poly_baker(cfg.true_params), rng);
        case Scenario::vonmises_select: return sample_vonmises2(n, unpack_vonmises(cfg.true_params), rng);
        case Scenario::custom: break;
    }
    throw ContractError("custom scenarios have no simulator");
}

ModelFamily scenario_family(const ExperimentConfig& cfg) {
    switch (cfg.scenario) {
        case Scenario::baker_fit: {
            ModelFamily f;
            f.name = "baker";
            f.tag = FamilyTag::baker;
            f.max_order = 1;
            const ShapeBounds b = cfg.bounds;
            f.build = [b](std::size_t) { return std::make_unique<BakerModel>(b); };
            const InitOptions io = cfg.init;
            f.initial = [io](const Dataset& d, std::size_t) { return default_init(d, FamilyTag::baker, 1, io); };
            f.embed = [](std::span<const double> p, std::size_t) { return std::vector<double>(p.begin(), p.end()); };
            return f;
        }
        case Scenario::ar_select: return ar_baker_family(cfg.init, cfg.bounds);
        case Scenario::poly_select: return poly_baker_family(cfg.init, cfg.bounds);
        case Scenario::vonmises_select: return vonmises_family();
        case Scenario::custom: break;
    }
    throw ContractError("custom scenarios have no family");
}

std::uint64_t replication_stream(std::size_t size_index, std::size_t rep) {
    return static_cast<std::uint64_t>(size_index) * 1'000'000ULL + rep;
}

namespace {

// Runs fn(0..count-1) on a small pool; results are written by index so the
// fold afterwards is independent of scheduling.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentReport new_report(const ExperimentConfig& cfg, std::string kind) {
    ExperimentReport r;
    r.config = cfg;
    r.kind = std::move(kind);
    r.config_hash = config_hash(cfg);
    r.timestamp = utc_timestamp();
    return r;
}

}  // namespace

std::string config_hash(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << to_string(cfg.scenario) << '|' << cfg.replications << '|' << cfg.master_seed << '|' << cfg.max_order << '|'
       << cfg.true_order << '|' << cfg.burn_in << '|';
    for (auto n : cfg.sample_sizes) os << n << ',';
    os << '|';
    for (auto c : cfg.criteria) os << to_string(c) << ',';
    os << '|';
    for (double v : cfg.true_params) os << v << ',';
    os << '|' << to_string(cfg.fit.optimizer) << ',' << cfg.fit.adam.lr << ',' << cfg.fit.adam.max_iter << ','
       << cfg.fit.adam.tol << ',' << cfg.fit.bfgs.max_iter << ',' << cfg.fit.bfgs.grad_tol << ',' << cfg.fit.analytic_gradient
       << '|' << cfg.init.alpha << ',' << cfg.init.k << '|' << cfg.bounds.alpha_min << ',' << cfg.bounds.k_min << '|'
       << static_cast<int>(cfg.design.kind) << ',' << cfg.design.a << ',' << cfg.design.b;
    // FNV-1a, 64 bit.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : os.str()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<EstimateRow> summarize_estimates(const std::vector<std::vector<double>>& fits,
                                             const std::vector<std::string>& names) {
    std::vector<EstimateRow> rows;
    for (std::size_t j = 0; j < names.size(); ++j) {
        EstimateRow row;
        row.name = names[j];
        if (fits.empty()) {
            row.mean = std::nan("");
            rows.push_back(row);
            continue;
        }
        double sum = 0.0;
        for (const auto& f : fits) sum += f.at(j);
        row.mean = sum / static_cast<double>(fits.size());
        if (fits.size() > 1) {
            double ss = 0.0;
            for (const auto& f : fits) ss += (f[j] - row.mean) * (f[j] - row.mean);
            row.sd = std::sqrt(ss / static_cast<double>(fits.size() - 1));
        }
        rows.push_back(row);
    }
    return rows;
}

ExperimentReport run_selection_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.criteria.empty()) throw ContractError("a selection experiment needs at least one criterion");
    ExperimentReport report = new_report(cfg, "selection");
    const ModelFamily family = scenario_family(cfg);
    ScanConfig scan_cfg;
    scan_cfg.max_order = cfg.max_order;
    scan_cfg.criteria = cfg.criteria;
    scan_cfg.fit = cfg.fit;

    for (std::size_t si = 0; si < cfg.sample_sizes.size(); ++si) {
        const std::size_t n = cfg.sample_sizes[si];
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<ReplicationRecord> recs(cfg.replications);
        parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
            ReplicationRecord& rec = recs[r];
            rec.n = n;
            rec.replication = r;
            rec.master_seed = cfg.master_seed;
            rec.stream_id = replication_stream(si, r);
            try {
                RngStream rng(rec.master_seed, rec.stream_id);
                const Dataset data = simulate_scenario(cfg, n, rng);
                const SelectionScan scan = scan_nested(data, family, scan_cfg);
                for (Criterion c : cfg.criteria) {
                    auto it = scan.selected.find(c);
                    if (it == scan.selected.end()) {
                        throw ScanError(std::string(to_string(c)) + " selected no candidate");
                    }
                    rec.selected[c] = it->second;
                }
                const auto& best = scan.candidates[cfg.true_order - 1];
                if (best.fit) rec.params_hat = best.fit->params_hat;
                rec.warnings = scan.warnings;
            } catch (const std::exception& e) {
                rec.excluded = true;
                rec.error = e.what();
                rec.selected.clear();
            }
        });

        SizeSummary sum;
        sum.n = n;
        for (Criterion c : cfg.criteria) sum.frequency[c].assign(cfg.max_order, 0);
        std::vector<std::vector<double>> fits;
        for (const auto& rec : recs) {
            if (rec.excluded) {
                ++sum.excluded;
                continue;
            }
            for (const auto& [c, order] : rec.selected) ++sum.frequency[c][order - 1];
            if (!rec.params_hat.empty()) fits.push_back(rec.params_hat);
        }
        sum.estimates = summarize_estimates(fits, family.build(cfg.true_order)->param_names());
        sum.seconds = seconds_since(t0);
        report.sizes.push_back(std::move(sum));
        report.records.insert(report.records.end(), recs.begin(), recs.end());
    }
    return report;
}

ExperimentReport run_estimation_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    ExperimentReport report = new_report(cfg, "estimation");
    const ModelFamily family = scenario_family(cfg);
    const std::vector<std::string> names = family.build(cfg.true_order)->param_names();

    for (std::size_t si = 0; si < cfg.sample_sizes.size(); ++si) {
        const std::size_t n = cfg.sample_sizes[si];
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<ReplicationRecord> recs(cfg.replications);
        parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
            ReplicationRecord& rec = recs[r];
            rec.n = n;
            rec.replication = r;
            rec.master_seed = cfg.master_seed;
            rec.stream_id = replication_stream(si, r);
            try {
                RngStream rng(rec.master_seed, rec.stream_id);
                const Dataset data = simulate_scenario(cfg, n, rng);
                const auto model = family.build(cfg.true_order);
                const FitResult fit = mgice(data, *model, family.initial(data, cfg.true_order), cfg.fit);
                rec.params_hat = fit.params_hat;
                if (!fit.converged) rec.warnings.push_back("fit did not converge: " + fit.message);
            } catch (const std::exception& e) {
                rec.excluded = true;
                rec.error = e.what();
            }
        });

        SizeSummary sum;
        sum.n = n;
        std::vector<std::vector<double>> fits;
        for (const auto& rec : recs) {
            if (rec.excluded) {
                ++sum.excluded;
            } else {
                fits.push_back(rec.params_hat);
            }
        }
        sum.estimates = summarize_estimates(fits, names);
        sum.seconds = seconds_since(t0);
        report.sizes.push_back(std::move(sum));
        report.records.insert(report.records.end(), recs.begin(), recs.end());
    }
    return report;
}

// --- penalty runtime --------------------------------------------------------

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<RuntimeRow> penalty_runtime_bench(std::span<const std::size_t> n_grid,
                                              std::span<const std::size_t> param_dims,
                                              std::span<const Criterion> criteria, std::size_t trials,
                                              std::uint64_t seed) {
    if (trials < 1) throw ContractError("at least one trial is needed");
    std::vector<RuntimeRow> rows;
    const ArBakerParams gen{{0.5}, 0.0, 1.0, 0.5, 1.5};
    for (Criterion c : criteria) {
        if (c != Criterion::mic1 && c != Criterion::mic2 && c != Criterion::gicc) {
            throw ContractError("runtime bench covers mic1, mic2 and gicc");
        }
        for (std::size_t h : param_dims) {
            if (h < 3) throw ContractError("the bench model has at least 3 parameters");
            const std::size_t p = h - 2;
            for (std::size_t n : n_grid) {
                RuntimeRow row{c, n, h, 0.0, trials};
                std::vector<double> times;
                if (c == Criterion::gicc) {
                    RngStream rng(seed, n * 16 + h);
                    const Dataset data = simulate_ar_baker(n + p, gen, rng);
                    const ArGaussianModel model(p);
                    std::vector<double> ls = least_squares_ar(data.values(), p);
                    double asum = 0.0;
                    for (std::size_t j = 0; j < p; ++j) asum += ls[j];
                    ls[p] /= (1.0 - asum);  // intercept -> mean
                    const std::vector<double> z = model.constraints().to_internal(ls);
                    // Small n finishes in well under a millisecond; repeat until a
                    // sample spans 20 ms so scheduler jitter does not dominate.
                    for (std::size_t t = 0; t < trials; ++t) {
                        const auto t0 = std::chrono::steady_clock::now();
                        std::size_t reps = 0;
                        double elapsed = 0.0;
                        do {
                            const BiasEstimate b = estimate_bias(data, model, z);
                            if (!std::isfinite(b.b_value)) throw BiasError("bench bias is not finite");
                            ++reps;
                            elapsed = seconds_since(t0);
                        } while (elapsed < 0.02);
                        times.push_back(elapsed / static_cast<double>(reps));
                    }
                } else {
                    // One factor evaluation is below timer resolution; time a batch.
                    constexpr int kBatch = 10000;
                    const MicVariant v = c == Criterion::mic1 ? MicVariant::mic1 : MicVariant::mic2;
                    volatile double sink = 0.0;
                    for (std::size_t t = 0; t < trials; ++t) {
                        const auto t0 = std::chrono::steady_clock::now();
                        for (int i = 0; i < kBatch; ++i) {
                            const GicValue g{1.0 + 1e-9 * i, n, 0};
                            sink = sink + mic(g, h, v);
                        }
                        times.push_back(seconds_since(t0) / kBatch);
                    }
                }
                row.median_seconds = median(times);
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::optional<double> runtime_of(std::span<const RuntimeRow> rows, Criterion c, std::size_t n, std::size_t h) {
    for (const auto& r : rows) {
        if (r.criterion == c && r.n == n && r.param_dim == h) return r.median_seconds;
    }
    return std::nullopt;
}

// --- forecasting -------------------------------------------------------------

std::vector<double> ar_forecast(std::span<const double> history, std::span<const double> a, double c,
                                std::size_t horizon) {
    if (horizon < 1) throw ContractError("forecast horizon must be at least 1");
    const std::size_t p = a.size();
    if (history.size() < p) throw ContractError("history is shorter than the AR order");
    std::vector<double> path(history.end() - static_cast<std::ptrdiff_t>(p), history.end());
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        double v = c;
        for (std::size_t j = 1; j <= p; ++j) v += a[j - 1] * (path[path.size() - j] - c);
        path.push_back(v);
        out.push_back(v);
    }
    return out;
}

std::vector<ForecastRow> rolling_forecast_mse(std::span<const double> series, std::span<const ForecastModel> models,
                                              std::size_t horizon, std::size_t holdout) {
    if (horizon < 1) throw ContractError("forecast horizon must be at least 1");
    if (models.empty()) throw ContractError("no forecast models given");
    if (holdout < 1) throw ContractError("holdout must be at least 1");
    std::size_t max_p = 0;
    for (const auto& m : models) max_p = std::max(max_p, m.a.size());
    if (holdout + max_p + 1 > series.size()) throw ContractError("holdout is too long for the series");
    const std::size_t first = series.size() - holdout;
    if (first + 1 < max_p + horizon) throw ContractError("not enough history before the holdout window");

    std::vector<ForecastRow> rows;
    for (const auto& m : models) {
        double ss = 0.0;
        for (std::size_t t = first; t < series.size(); ++t) {
            const std::size_t origin_len = t + 1 - horizon;  // values 0..t-horizon are known
            const auto path = ar_forecast(series.first(origin_len), m.a, m.c, horizon);
            const double e = series[t] - path.back();
            ss += e * e;
        }
        rows.push_back({m.label, ss / static_cast<double>(holdout), 1.0});
    }
    for (auto& r : rows) r.ratio = r.mse / rows.front().mse;
    return rows;
}

ForecastModel forecast_model_from_fit(std::string label, std::span<const double> ar_baker_params) {
    if (ar_baker_params.size() < 5) throw ContractError("AR-Baker parameters have at least 5 entries");
    const std::size_t p = ar_baker_params.size() - 4;
    ForecastModel m;
    m.label = std::move(label);
    m.a.assign(ar_baker_params.begin(), ar_baker_params.begin() + static_cast<std::ptrdiff_t>(p));
    m.c = ar_baker_params[p];
    return m;
}

// --- residual moments ---------------------------------------------------------

std::pair<double, double> skewness_kurtosis(std::span<const double> v) {
    if (v.empty()) throw ContractError("no values");
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = x - mean, d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) throw MomentError("values have zero variance");
    return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

MomentSummary residual_bootstrap_moments(std::span<const double> residuals, std::size_t resamples, RngStream& rng) {
    if (residuals.size() < 8) throw ContractError("bootstrap moments need at least 8 residuals");
    if (resamples < 2) throw ContractError("bootstrap needs at least 2 resamples");
    MomentSummary out;
    std::tie(out.skewness, out.excess_kurtosis) = skewness_kurtosis(residuals);

    const std::size_t n = residuals.size();
    std::vector<double> draw(n), skews, kurts;
    for (std::size_t b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto idx = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
            draw[i] = residuals[idx];
        }
        try {
            const auto [s, k] = skewness_kurtosis(draw);
            skews.push_back(s);
            kurts.push_back(k);
        } catch (const MomentError&) {
            // a constant resample carries no moment information
        }
    }
    if (skews.size() < 2) throw MomentError("bootstrap resamples are degenerate");
    auto sd = [](const std::vector<double>& v) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        return std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    out.se_skewness = sd(skews);
    out.se_kurtosis = sd(kurts);
    return out;
}

MomentSummary baker_reference_moments(double alpha, double k, std::size_t n, std::size_t replications,
                                      RngStream& rng) {
    if (replications < 2) throw ContractError("reference moments need at least 2 replications");
    if (n < 8) throw ContractError("reference samples need at least 8 draws");
    std::vector<std::vector<double>> est;
    for (std::size_t r = 0; r < replications; ++r) {
        const auto x = sample_baker(n, BakerParams{0.0, 1.0, alpha, k}, rng);
        const auto [s, kk] = skewness_kurtosis(x);
        est.push_back({s, kk});
    }
    const auto rows = summarize_estimates(est, {"skewness", "excess_kurtosis"});
    return {rows[0].mean, rows[1].mean, *rows[0].sd, *rows[1].sd};
}

// --- rate diagnostic ----------------------------------------------------------

RateDiagnostic rate_diagnostic(const ExperimentConfig& cfg, std::size_t n_small, std::size_t n_large,
                               std::size_t replications) {
    if (cfg.true_order < 1 || cfg.true_order + 1 > cfg.max_order) {
        throw ContractError("the rate diagnostic needs k0 + 1 <= K");
    }
    if (n_small == 0 || n_large == 0) throw ContractError("sample sizes must be positive");
    // Equal sizes are allowed as a control run (ratio near 1).
    if (n_large != n_small && n_large < 4 * n_small) throw ContractError("n_large must be at least 4 * n_small");
    if (replications < 1) throw ContractError("replications must be at least 1");
    if (cfg.scenario == Scenario::custom || cfg.scenario == Scenario::baker_fit) {
        throw ContractError("the rate diagnostic needs a nested selection scenario");
    }
    const ModelFamily family = scenario_family(cfg);
    const std::size_t k0 = cfg.true_order;
    FitOptions opts = cfg.fit;
    if (cfg.scenario == Scenario::ar_select) opts.truncation_l = k0 + 1;

    RateDiagnostic out;
    out.n_small = n_small;
    out.n_large = n_large;
    const std::size_t sizes[2] = {n_small, n_large};
    double medians[2] = {0.0, 0.0};
    for (std::size_t si = 0; si < 2; ++si) {
        std::vector<double> gaps(replications, std::nan(""));
        parallel_for(replications, cfg.threads, [&](std::size_t r) {
            try {
                RngStream rng(cfg.master_seed, replication_stream(si, r));
                const Dataset data = simulate_scenario(cfg, sizes[si], rng);
                const auto small = family.build(k0);
                const auto big = family.build(k0 + 1);
                const FitResult f0 = mgice(data, *small, family.initial(data, k0), opts);
                const auto seed = big->constraints().nudge_inside(family.embed(f0.params_hat, k0));
                const FitResult f1 = mgice(data, *big, seed, opts);
                const double g0 = f0.gic_at_opt.value, g1 = f1.gic_at_opt.value;
                if (g0 > 0.0 && g1 > 0.0) gaps[r] = std::abs(std::log(g1) - std::log(g0));
            } catch (const std::exception&) {
                // counted below
            }
        });
        std::vector<double> ok;
        for (double g : gaps) {
            if (std::isnan(g)) {
                ++out.failures;
            } else {
                ok.push_back(g);
            }
        }
        if (ok.empty()) throw ScanError("every rate-diagnostic replication failed");
        medians[si] = median(ok);
    }
    out.median_small = medians[0];
    out.median_large = medians[1];
    out.ratio = out.median_small > 0.0 ? out.median_large / out.median_small : std::nan("");
    out.passed = out.ratio <= 0.75;
    return out;
}

}  // namespace micsel
