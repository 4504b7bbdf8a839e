// micsel command-line front end. Exit codes: 0 ok, 1 usage, 2 runtime/model.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "micsel/errors.hpp"
#include "micsel/experiments.hpp"
#include "micsel/io.hpp"
#include "micsel/report.hpp"

using namespace micsel;
using nlohmann::json;

namespace {

constexpr const char* kSeedEnv = "MICSEL_SEED";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string out;
    std::string md;
    std::string optimizer;
    double lr = 0.0;
    int max_iter = 0;
    double tol = 0.0;
    bool fd_gradient = false;
    double init_alpha = InitOptions{}.alpha;
    double init_k = InitOptions{}.k;
    double alpha_min = ShapeBounds{}.alpha_min;
    double k_min = ShapeBounds{}.k_min;
    std::uint64_t seed = 1;
    std::string seed_source = "default";
};

struct Input {
    std::string path;
    std::vector<std::string> columns;
    std::vector<std::string> transforms;
};

void add_output(CLI::App* sc, Common& c) {
    sc->add_option("--out", c.out, "JSON report path (stdout when omitted)");
    sc->add_option("--markdown", c.md, "Markdown report path");
}

void add_fit_flags(CLI::App* sc, Common& c) {
    sc->add_option("--optimizer", c.optimizer, "adam or bfgs")->check(CLI::IsMember({"adam", "bfgs"}));
    sc->add_option("--lr", c.lr, "Adam learning rate");
    sc->add_option("--max-iter", c.max_iter, "Iteration cap");
    sc->add_option("--tol", c.tol, "Adam update tolerance or BFGS gradient tolerance");
    sc->add_flag("--fd-gradient", c.fd_gradient, "Finite-difference parameter gradients");
    sc->add_option("--init-alpha", c.init_alpha, "Starting alpha for Baker-type families");
    sc->add_option("--init-k", c.init_k, "Starting k for Baker-type families");
    sc->add_option("--alpha-min", c.alpha_min, "Lower bound on alpha")->check(CLI::NonNegativeNumber);
    sc->add_option("--k-min", c.k_min, "Lower bound on k")->check(CLI::NonNegativeNumber);
}

void add_seed(CLI::App* sc, Common& c) {
    sc->add_option("--seed", c.seed, std::string("Master seed (default from ") + kSeedEnv + " or 1)");
}

void add_input(CLI::App* sc, Input& in) {
    sc->add_option("--input", in.path, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    sc->add_option("--columns", in.columns, "Columns to read (regression: x,y)")->delimiter(',');
    sc->add_option("--transform", in.transforms,
                   "Transform, optionally on one column: log, log_return, standardize, bins_to_radians(B); "
                   "append @column to restrict");
}

void resolve_seed(Common& c, bool explicit_seed) {
    if (explicit_seed) {
        c.seed_source = "flag";
        return;
    }
    if (const char* env = std::getenv(kSeedEnv)) {
        try {
            c.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer");
        }
        c.seed_source = kSeedEnv;
    }
}

FitOptions fit_options(const Common& c, OptimizerKind def) {
    FitOptions f;
    f.optimizer = c.optimizer.empty() ? def : report::parse_optimizer(c.optimizer);
    if (c.lr > 0) f.adam.lr = c.lr;
    if (c.max_iter > 0) f.adam.max_iter = f.bfgs.max_iter = c.max_iter;
    if (c.tol > 0) {
        f.adam.tol = c.tol;
        f.bfgs.grad_tol = c.tol;
    }
    f.analytic_gradient = !c.fd_gradient;
    return f;
}

json fit_json(const FitOptions& f) {
    return {{"optimizer", std::string(to_string(f.optimizer))},
            {"adam_lr", f.adam.lr},
            {"adam_max_iter", f.adam.max_iter},
            {"adam_tol", f.adam.tol},
            {"bfgs_max_iter", f.bfgs.max_iter},
            {"bfgs_grad_tol", f.bfgs.grad_tol},
            {"analytic_gradient", f.analytic_gradient}};
}

// --- families ----------------------------------------------------------------

struct FamilyChoice {
    std::string name;
    DataKind kind;
    std::size_t width;
    OptimizerKind default_optimizer;
};

FamilyChoice family_choice(const std::string& name) {
    if (name == "baker") return {name, DataKind::unconditional, 1, OptimizerKind::adam};
    if (name == "ar-baker") return {name, DataKind::timeseries, 1, OptimizerKind::bfgs};
    if (name == "poly-baker") return {name, DataKind::regression, 2, OptimizerKind::adam};
    if (name == "vonmises") return {name, DataKind::unconditional, 2, OptimizerKind::bfgs};
    throw UsageError("unknown family '" + name + "'");
}

ModelFamily build_family(const FamilyChoice& fc, const Common& c) {
    const InitOptions init{c.init_alpha, c.init_k};
    const ShapeBounds bounds{c.alpha_min, c.k_min};
    if (fc.name == "ar-baker") return ar_baker_family(init, bounds);
    if (fc.name == "poly-baker") return poly_baker_family(init, bounds);
    if (fc.name == "vonmises") return vonmises_family();
    ExperimentConfig e = scenario_defaults(Scenario::baker_fit);
    e.init = init;
    e.bounds = bounds;
    return scenario_family(e);
}

Dataset load(const Input& in, const FamilyChoice& fc) {
    std::vector<std::string> cols = in.columns;
    if (cols.empty()) {
        // Default to the leading columns of the header.
        std::ifstream f(in.path);
        std::string header;
        std::getline(f, header);
        std::stringstream ss(header);
        for (std::string cell; cols.size() < fc.width && std::getline(ss, cell, ',');) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            cols.push_back(cell);
        }
    }
    if (cols.size() != fc.width) {
        throw UsageError(fc.name + " needs " + std::to_string(fc.width) + " column(s), got " +
                         std::to_string(cols.size()));
    }
    Dataset d = ingest_csv(in.path, {cols, fc.kind});
    for (const auto& t : in.transforms) {
        const auto at = t.find('@');
        TransformSpec spec = parse_transform(std::string_view(t).substr(0, at));
        if (at != std::string::npos) {
            const std::string col = t.substr(at + 1);
            const auto it = std::find(cols.begin(), cols.end(), col);
            if (it == cols.end()) throw UsageError("transform column '" + col + "' is not selected");
            spec.column = static_cast<std::size_t>(it - cols.begin());
        }
        d = transform(d, spec);
    }
    return d;
}

json input_json(const Input& in) { return {{"path", in.path}, {"columns", in.columns}, {"transforms", in.transforms}}; }

// --- output ------------------------------------------------------------------

void emit(const Common& c, json doc, const std::string& md, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    doc["warnings"] = warnings;
    doc["seed"] = {{"value", c.seed}, {"source", c.seed_source}, {"env", kSeedEnv}};
    const std::string text = doc.dump(2) + "\n";
    if (c.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(c.out);
        if (!(f << text)) throw DataError("cannot write '" + c.out + "'");
        std::cout << md;
    }
    if (!c.md.empty()) {
        std::ofstream f(c.md);
        if (!(f << md)) throw DataError("cannot write '" + c.md + "'");
    }
}

json header(const std::string& command) { return {{"schema_version", report::kSchemaVersion}, {"command", command}}; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model selection for unnormalized densities by GIC maximization"};
    app.require_subcommand(1);
    app.allow_extras(false);

    Common c;
    Input in;
    std::string family = "ar-baker";
    std::size_t order = 1, max_order = 10, horizon = 1, holdout = 100, resamples = 1000;
    std::string variant = "m2";
    std::vector<std::string> criteria;
    std::vector<std::size_t> orders{1, 3};

    // fit
    auto* fit = app.add_subcommand("fit", "Fit one model by GIC maximization");
    fit->add_option("--family", family, "baker, ar-baker, poly-baker or vonmises")->required();
    fit->add_option("--order", order, "AR order or polynomial degree");
    fit->add_option("--variant", variant, "von Mises candidate: m1 or m2")->check(CLI::IsMember({"m1", "m2"}));
    add_input(fit, in);
    add_fit_flags(fit, c);
    add_output(fit, c);
    add_seed(fit, c);

    // select
    auto* sel = app.add_subcommand("select", "Scan nested candidates 1..K");
    sel->add_option("--family", family, "ar-baker, poly-baker or vonmises")->required();
    sel->add_option("--max-order", max_order, "Largest candidate K")->check(CLI::PositiveNumber);
    sel->add_option("--criterion", criteria, "mic1, mic2, gicc, aic, bic (repeatable)");
    add_input(sel, in);
    add_fit_flags(sel, c);
    add_output(sel, c);
    add_seed(sel, c);

    // simulate
    std::string scenario = "ar-select", config_path, dump_csv;
    std::vector<std::size_t> sizes;
    std::size_t reps = 0, threads = 0, true_order = 0;
    bool estimate = false;
    auto* sim = app.add_subcommand("simulate", "Replicated simulation experiment");
    sim->add_option("--scenario", scenario, "baker-fit, ar-select, poly-select, vonmises-select");
    sim->add_option("--config", config_path, "Re-run the config echoed in an earlier report")
        ->check(CLI::ExistingFile);
    sim->add_option("--n", sizes, "Sample size(s)");
    sim->add_option("--reps", reps, "Replications per size");
    sim->add_option("--max-order", max_order, "Largest candidate K");
    sim->add_option("--true-order", true_order, "True order k0");
    sim->add_option("--criterion", criteria, "Criteria to tabulate (repeatable)");
    sim->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sim->add_flag("--estimate", estimate, "Fit the true order only and tabulate estimates");
    sim->add_option("--dump-csv", dump_csv, "Write replication 0 of the first size as CSV");
    add_fit_flags(sim, c);
    add_output(sim, c);
    add_seed(sim, c);

    // forecast
    auto* fc = app.add_subcommand("forecast", "Rolling AR-Baker forecasts over a holdout window");
    fc->add_option("--orders", orders, "AR orders to compare; the first is the baseline")->delimiter(',');
    fc->add_option("--horizon", horizon, "Steps ahead m");
    fc->add_option("--holdout", holdout, "Holdout length");
    add_input(fc, in);
    add_fit_flags(fc, c);
    add_output(fc, c);
    add_seed(fc, c);

    // bench
    std::vector<std::size_t> bench_n{1000, 10000}, bench_h{3, 5, 8};
    std::size_t trials = 11;
    auto* bench = app.add_subcommand("bench", "Time the MIC and GICc penalty terms");
    bench->add_option("--n", bench_n, "Sample sizes")->delimiter(',');
    bench->add_option("--params", bench_h, "Parameter counts (>= 3)")->delimiter(',');
    bench->add_option("--criterion", criteria, "mic1, mic2, gicc (repeatable)");
    bench->add_option("--trials", trials, "Trials per cell")->check(CLI::PositiveNumber);
    add_output(bench, c);
    add_seed(bench, c);

    // diagnostics
    auto* diag = app.add_subcommand("diagnostics", "Residual moments and the GIC rate diagnostic");
    diag->require_subcommand(1);
    auto* mom = diag->add_subcommand("moments", "Bootstrap skewness and excess kurtosis of residuals");
    mom->add_option("--order", order, "Polynomial degree when two columns are given");
    mom->add_option("--resamples", resamples, "Bootstrap resamples");
    add_input(mom, in);
    add_fit_flags(mom, c);
    add_output(mom, c);
    add_seed(mom, c);
    double ref_alpha = 0.0, ref_k = 0.0;
    std::size_t ref_n = 10000;
    auto* ref = diag->add_subcommand("baker-kurtosis", "Reference moments of a Baker shape by simulation");
    ref->add_option("--alpha", ref_alpha, "alpha")->required();
    ref->add_option("--k", ref_k, "k")->required();
    ref->add_option("--n", ref_n, "Draws per replication");
    ref->add_option("--reps", reps, "Replications");
    add_output(ref, c);
    add_seed(ref, c);
    std::size_t n_small = 1000, n_large = 4000;
    auto* rate = diag->add_subcommand("rate", "Median |log GIC(k0+1) - log GIC(k0)| at two sizes");
    rate->add_option("--scenario", scenario, "Selection scenario");
    rate->add_option("--n-small", n_small, "Smaller size");
    rate->add_option("--n-large", n_large, "Larger size");
    rate->add_option("--reps", reps, "Replications");
    rate->add_option("--threads", threads, "Worker threads");
    add_fit_flags(rate, c);
    add_output(rate, c);
    add_seed(rate, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    CLI::App* active = app.get_subcommands().front();
    if (active == diag) active = diag->get_subcommands().front();

    try {
        resolve_seed(c, active->count("--seed") > 0);
        std::vector<std::string> warnings;

        if (active == fit) {
            const FamilyChoice fchoice = family_choice(family);
            const Dataset data = load(in, fchoice);
            const ModelFamily fam = build_family(fchoice, c);
            const FitOptions opts = fit_options(c, fchoice.default_optimizer);
            json doc = header("fit");
            doc["config"] = {{"family", family}, {"order", order},     {"variant", variant},
                             {"input", input_json(in)}, {"fit", fit_json(opts)},
                             {"init", {{"alpha", c.init_alpha}, {"k", c.init_k}}},
                             {"bounds", {{"alpha_min", c.alpha_min}, {"k_min", c.k_min}}}};
            std::string md;
            if (family == "vonmises") {
                // Both candidates are fitted so their MIC values can be compared.
                ScanConfig sc;
                sc.max_order = 2;
                sc.criteria = {Criterion::mic1, Criterion::mic2};
                sc.fit = opts;
                const SelectionScan scan = scan_nested(data, fam, sc);
                const std::size_t k = variant == "m1" ? 1 : 2;
                const auto& cand = scan.candidates[k - 1];
                if (!cand.fit) throw ScanError("the " + variant + " fit failed: " + cand.note);
                const auto names = fam.build(k)->param_names();
                doc["fit"] = report::to_json(*cand.fit, names);
                json mics = json::object();
                for (const auto& cd : scan.candidates) {
                    mics[cd.order == 1 ? "m1" : "m2"] = {
                        {"gic", cd.gic.value},
                        {"mic1", cd.values.count(Criterion::mic1) ? json(cd.values.at(Criterion::mic1)) : json()},
                        {"mic2", cd.values.count(Criterion::mic2) ? json(cd.values.at(Criterion::mic2)) : json()}};
                }
                doc["mic"] = mics;
                warnings = scan.warnings;
                md = report::markdown(*cand.fit, names) + "\n" + report::markdown(scan);
            } else {
                const std::size_t k = family == "baker" ? 1 : order;
                const auto model = fam.build(k);
                const FitResult f = mgice(data, *model, fam.initial(data, k), opts);
                const auto names = model->param_names();
                doc["fit"] = report::to_json(f, names);
                if (!f.converged) warnings.push_back("fit did not converge: " + f.message);
                if (f.at_boundary) warnings.push_back("fit ended at a parameter boundary");
                if (f.gic_at_opt.value < 0) warnings.push_back("GIC at the optimum is negative");
                md = report::markdown(f, names);
            }
            emit(c, doc, md, warnings);
            return 0;
        }

        if (active == sel) {
            const FamilyChoice fchoice = family_choice(family);
            if (family == "baker") throw UsageError("the Baker family has a single candidate");
            const Dataset data = load(in, fchoice);
            const ModelFamily fam = build_family(fchoice, c);
            ScanConfig sc;
            sc.max_order = family == "vonmises" ? 2 : max_order;
            sc.fit = fit_options(c, fchoice.default_optimizer);
            std::vector<Criterion> gaussian;
            sc.criteria.clear();
            for (const auto& s : criteria.empty() ? std::vector<std::string>{"mic1", "mic2"} : criteria) {
                const Criterion cr = parse_criterion(s);
                (cr == Criterion::aic || cr == Criterion::bic ? gaussian : sc.criteria).push_back(cr);
            }
            json doc = header("select");
            json crit = json::array();
            for (const auto& s : criteria) crit.push_back(s);
            doc["config"] = {{"family", family},          {"max_order", sc.max_order},
                             {"criteria", crit},          {"input", input_json(in)},
                             {"fit", fit_json(sc.fit)},
                             {"init", {{"alpha", c.init_alpha}, {"k", c.init_k}}},
                             {"bounds", {{"alpha_min", c.alpha_min}, {"k_min", c.k_min}}}};
            std::string md;
            if (!sc.criteria.empty()) {
                const SelectionScan scan = scan_nested(data, fam, sc);
                doc["scan"] = report::to_json(scan, fam.build(sc.max_order)->param_names());
                warnings = scan.warnings;
                md += report::markdown(scan);
            }
            if (!gaussian.empty()) {
                if (family == "vonmises") throw UsageError("AIC/BIC are available for ar-baker and poly-baker data");
                const SelectionScan g = aic_bic_gaussian(data, sc.max_order);
                doc["gaussian"] = report::to_json(g, {});
                md += (md.empty() ? "" : "\n") + std::string("Gaussian-noise reference\n\n") + report::markdown(g);
            }
            emit(c, doc, md, warnings);
            return 0;
        }

        if (active == sim) {
            ExperimentConfig cfg;
            if (!config_path.empty()) {
                std::ifstream f(config_path);
                json j = json::parse(f, nullptr, false);
                if (j.is_discarded()) throw UsageError("'" + config_path + "' is not JSON");
                cfg = report::config_from_json(j.contains("config") ? j["config"] : j);
                estimate = j.value("kind", std::string()) == "estimation" || estimate;
            } else {
                cfg = scenario_defaults(parse_scenario(scenario));
                cfg.fit = fit_options(c, cfg.fit.optimizer);
                cfg.init = {c.init_alpha, c.init_k};
                cfg.bounds = {c.alpha_min, c.k_min};
                if (cfg.scenario == Scenario::baker_fit) estimate = true;
            }
            if (!sizes.empty()) cfg.sample_sizes = sizes;
            if (sim->count("--reps")) cfg.replications = reps;
            if (sim->count("--max-order")) cfg.max_order = max_order;
            if (sim->count("--true-order")) cfg.true_order = true_order;
            if (!criteria.empty()) {
                cfg.criteria.clear();
                for (const auto& s : criteria) cfg.criteria.push_back(parse_criterion(s));
            }
            if (sim->count("--threads")) cfg.threads = threads;
            if (sim->count("--seed") || config_path.empty()) {
                cfg.master_seed = c.seed;
            } else {
                c.seed = cfg.master_seed;
                c.seed_source = "config";
            }
            validate(cfg);

            if (!dump_csv.empty()) {
                RngStream rng(cfg.master_seed, replication_stream(0, 0));
                const Dataset d = simulate_scenario(cfg, cfg.sample_sizes.front(), rng);
                std::vector<std::string> names;
                if (d.kind() == DataKind::regression) {
                    names = {"x", "y"};
                } else if (d.width() == 2) {
                    names = {"theta1", "theta2"};
                } else {
                    names = {"x"};
                }
                write_csv(dump_csv, d, names);
            }
            const ExperimentReport rep = estimate ? run_estimation_experiment(cfg) : run_selection_experiment(cfg);
            for (const auto& r : rep.records) {
                if (r.excluded) {
                    warnings.push_back("n=" + std::to_string(r.n) + " replication " + std::to_string(r.replication) +
                                       " excluded: " + r.error);
                }
            }
            json doc = report::to_json(rep);
            doc["command"] = "simulate";
            emit(c, doc, report::markdown(rep), warnings);
            return 0;
        }

        if (active == fc) {
            const FamilyChoice fchoice = family_choice("ar-baker");
            const Dataset data = load(in, fchoice);
            const auto all = data.values();
            if (holdout >= all.size()) throw UsageError("holdout is longer than the series");
            const Dataset train =
                Dataset::timeseries(std::vector<double>(all.begin(), all.end() - static_cast<std::ptrdiff_t>(holdout)));
            const ModelFamily fam = build_family(fchoice, c);
            const FitOptions opts = fit_options(c, fchoice.default_optimizer);
            std::vector<ForecastModel> models;
            json fits = json::array();
            for (std::size_t p : orders) {
                const auto model = fam.build(p);
                const FitResult f = mgice(train, *model, fam.initial(train, p), opts);
                if (!f.converged) warnings.push_back("AR(" + std::to_string(p) + ") fit did not converge");
                models.push_back(forecast_model_from_fit("AR(" + std::to_string(p) + ")", f.params_hat));
                fits.push_back(report::to_json(f, model->param_names()));
            }
            const auto rows = rolling_forecast_mse(all, models, horizon, holdout);
            json doc = header("forecast");
            doc["config"] = {{"orders", orders},
                             {"horizon", horizon},
                             {"holdout", holdout},
                             {"input", input_json(in)},
                             {"fit", fit_json(opts)}};
            doc["fits"] = fits;
            doc["forecast"] = report::to_json(rows);
            emit(c, doc, report::markdown(rows), warnings);
            return 0;
        }

        if (active == bench) {
            std::vector<Criterion> cs;
            for (const auto& s : criteria.empty() ? std::vector<std::string>{"mic2", "gicc"} : criteria) {
                cs.push_back(parse_criterion(s));
            }
            const auto rows = penalty_runtime_bench(bench_n, bench_h, cs, trials, c.seed);
            json doc = header("bench");
            json crit = json::array();
            for (auto k : cs) crit.push_back(std::string(to_string(k)));
            doc["config"] = {{"n", bench_n}, {"h", bench_h}, {"criteria", crit}, {"trials", trials}};
            doc["runtime"] = report::to_json(rows);
            emit(c, doc, report::markdown(rows), warnings);
            return 0;
        }

        if (active == mom) {
            const bool regression = in.columns.size() == 2;
            const FamilyChoice fchoice = family_choice(regression ? "poly-baker" : "baker");
            const Dataset data = load(in, fchoice);
            std::vector<double> resid;
            json doc = header("diagnostics");
            if (regression) {
                const ModelFamily fam = build_family(fchoice, c);
                const auto model = fam.build(order);
                const FitResult f = mgice(data, *model, fam.initial(data, order), fit_options(c, OptimizerKind::adam));
                doc["fit"] = report::to_json(f, model->param_names());
                if (!f.converged) warnings.push_back("fit did not converge: " + f.message);
                const auto& p = f.params_hat;
                // (y - polynomial - c) / s on the standardized noise scale.
                for (std::size_t i = 0; i < data.size(); ++i) {
                    const double x = data.row(i)[0];
                    double mean = p[order], xp = 1.0;
                    for (std::size_t j = 0; j < order; ++j) {
                        xp *= x;
                        mean += p[j] * xp;
                    }
                    resid.push_back((data.row(i)[1] - mean) / p[order + 1]);
                }
            } else {
                resid.assign(data.values().begin(), data.values().end());
            }
            RngStream rng(c.seed, 0);
            const MomentSummary m = residual_bootstrap_moments(resid, resamples, rng);
            doc["config"] = {{"subcommand", "moments"}, {"order", order}, {"resamples", resamples},
                             {"input", input_json(in)}};
            doc["moments"] = report::to_json(m);
            emit(c, doc, report::markdown(m), warnings);
            return 0;
        }

        if (active == ref) {
            RngStream rng(c.seed, 0);
            const std::size_t r = reps ? reps : 1000;
            const MomentSummary m = baker_reference_moments(ref_alpha, ref_k, ref_n, r, rng);
            json doc = header("diagnostics");
            doc["config"] = {{"subcommand", "baker-kurtosis"}, {"alpha", ref_alpha}, {"k", ref_k}, {"n", ref_n},
                             {"reps", r}};
            doc["moments"] = report::to_json(m);
            emit(c, doc, report::markdown(m), warnings);
            return 0;
        }

        if (active == rate) {
            ExperimentConfig cfg = scenario_defaults(parse_scenario(scenario));
            cfg.fit = fit_options(c, cfg.fit.optimizer);
            cfg.master_seed = c.seed;
            if (rate->count("--threads")) cfg.threads = threads;
            const std::size_t r = reps ? reps : 100;
            const RateDiagnostic d = rate_diagnostic(cfg, n_small, n_large, r);
            if (d.failures) warnings.push_back(std::to_string(d.failures) + " replications failed");
            json doc = header("diagnostics");
            doc["config"] = {{"subcommand", "rate"}, {"experiment", report::to_json(cfg)}, {"n_small", n_small},
                             {"n_large", n_large}, {"reps", r}};
            doc["rate"] = report::to_json(d);
            emit(c, doc, report::markdown(d), warnings);
            return 0;
        }
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
