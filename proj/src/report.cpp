#include "micsel/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "micsel/errors.hpp"

namespace micsel::report {

using nlohmann::json;

namespace {

std::string fmt(double v, int digits = 4) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// NaN is not valid JSON; emit null instead.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string design_name(DesignRule::Kind k) { return k == DesignRule::Kind::uniform ? "uniform" : "normal"; }

void table_row(std::ostringstream& os, const std::vector<std::string>& cells) {
    os << '|';
    for (const auto& c : cells) os << ' ' << c << " |";
    os << '\n';
}

void table_head(std::ostringstream& os, const std::vector<std::string>& cells) {
    table_row(os, cells);
    os << '|';
    for (std::size_t i = 0; i < cells.size(); ++i) os << "---|";
    os << '\n';
}

}  // namespace

OptimizerKind parse_optimizer(std::string_view s) {
    if (s == "adam") return OptimizerKind::adam;
    if (s == "bfgs") return OptimizerKind::bfgs;
    throw ContractError("unknown optimizer '" + std::string(s) + "'");
}

json to_json(const ExperimentConfig& c) {
    json crit = json::array();
    for (auto k : c.criteria) crit.push_back(std::string(to_string(k)));
    return {
        {"scenario", std::string(to_string(c.scenario))},
        {"sample_sizes", c.sample_sizes},
        {"replications", c.replications},
        {"criteria", crit},
        {"master_seed", c.master_seed},
        {"true_params", c.true_params},
        {"max_order", c.max_order},
        {"true_order", c.true_order},
        {"burn_in", c.burn_in},
        {"threads", c.threads},
        {"optimizer",
         {{"kind", std::string(to_string(c.fit.optimizer))},
          {"adam_lr", c.fit.adam.lr},
          {"adam_max_iter", c.fit.adam.max_iter},
          {"adam_tol", c.fit.adam.tol},
          {"bfgs_max_iter", c.fit.bfgs.max_iter},
          {"bfgs_grad_tol", c.fit.bfgs.grad_tol},
          {"analytic_gradient", c.fit.analytic_gradient}}},
        {"init", {{"alpha", c.init.alpha}, {"k", c.init.k}}},
        {"bounds", {{"alpha_min", c.bounds.alpha_min}, {"k_min", c.bounds.k_min}}},
        {"design", {{"kind", design_name(c.design.kind)}, {"a", c.design.a}, {"b", c.design.b}}},
    };
}

ExperimentConfig config_from_json(const json& j) {
    try {
        ExperimentConfig c = scenario_defaults(parse_scenario(j.at("scenario").get<std::string>()));
        if (j.contains("sample_sizes")) c.sample_sizes = j["sample_sizes"].get<std::vector<std::size_t>>();
        if (j.contains("replications")) c.replications = j["replications"].get<std::size_t>();
        if (j.contains("criteria")) {
            c.criteria.clear();
            for (const auto& s : j["criteria"]) c.criteria.push_back(parse_criterion(s.get<std::string>()));
        }
        if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
        if (j.contains("true_params")) c.true_params = j["true_params"].get<std::vector<double>>();
        if (j.contains("max_order")) c.max_order = j["max_order"].get<std::size_t>();
        if (j.contains("true_order")) c.true_order = j["true_order"].get<std::size_t>();
        if (j.contains("burn_in")) c.burn_in = j["burn_in"].get<std::size_t>();
        if (j.contains("threads")) c.threads = j["threads"].get<std::size_t>();
        if (j.contains("optimizer")) {
            const auto& o = j["optimizer"];
            if (o.contains("kind")) c.fit.optimizer = parse_optimizer(o["kind"].get<std::string>());
            if (o.contains("adam_lr")) c.fit.adam.lr = o["adam_lr"].get<double>();
            if (o.contains("adam_max_iter")) c.fit.adam.max_iter = o["adam_max_iter"].get<int>();
            if (o.contains("adam_tol")) c.fit.adam.tol = o["adam_tol"].get<double>();
            if (o.contains("bfgs_max_iter")) c.fit.bfgs.max_iter = o["bfgs_max_iter"].get<int>();
            if (o.contains("bfgs_grad_tol")) c.fit.bfgs.grad_tol = o["bfgs_grad_tol"].get<double>();
            if (o.contains("analytic_gradient")) c.fit.analytic_gradient = o["analytic_gradient"].get<bool>();
        }
        if (j.contains("init")) {
            c.init.alpha = j["init"].value("alpha", c.init.alpha);
            c.init.k = j["init"].value("k", c.init.k);
        }
        if (j.contains("bounds")) {
            c.bounds.alpha_min = j["bounds"].value("alpha_min", c.bounds.alpha_min);
            c.bounds.k_min = j["bounds"].value("k_min", c.bounds.k_min);
        }
        if (j.contains("design")) {
            const auto& d = j["design"];
            if (d.contains("kind")) {
                const auto k = d["kind"].get<std::string>();
                if (k != "uniform" && k != "normal") throw ContractError("unknown design '" + k + "'");
                c.design.kind = k == "uniform" ? DesignRule::Kind::uniform : DesignRule::Kind::normal;
            }
            c.design.a = d.value("a", c.design.a);
            c.design.b = d.value("b", c.design.b);
        }
        return c;
    } catch (const json::exception& e) {
        throw ContractError(std::string("bad experiment config: ") + e.what());
    }
}

json to_json(const ExperimentReport& r) {
    json sizes = json::array();
    for (const auto& s : r.sizes) {
        json freq = json::object();
        for (const auto& [c, counts] : s.frequency) freq[std::string(to_string(c))] = counts;
        json est = json::array();
        for (const auto& e : s.estimates) {
            est.push_back({{"name", e.name}, {"mean", number(e.mean)}, {"sd", e.sd ? number(*e.sd) : json(nullptr)}});
        }
        sizes.push_back({{"n", s.n}, {"excluded", s.excluded}, {"frequency", freq}, {"estimates", est},
                         {"seconds", s.seconds}});
    }
    json recs = json::array();
    for (const auto& rec : r.records) {
        json sel = json::object();
        for (const auto& [c, k] : rec.selected) sel[std::string(to_string(c))] = k;
        json o = {{"n", rec.n},
                  {"replication", rec.replication},
                  {"master_seed", rec.master_seed},
                  {"stream_id", rec.stream_id},
                  {"excluded", rec.excluded},
                  {"selected", sel},
                  {"params_hat", rec.params_hat}};
        if (!rec.error.empty()) o["error"] = rec.error;
        if (!rec.warnings.empty()) o["warnings"] = rec.warnings;
        recs.push_back(std::move(o));
    }
    return {{"schema_version", kSchemaVersion},
            {"kind", r.kind},
            {"config", to_json(r.config)},
            {"config_hash", r.config_hash},
            {"timestamp", r.timestamp},
            {"sizes", sizes},
            {"records", recs}};
}

json to_json(const FitResult& fit, const std::vector<std::string>& names) {
    json params = json::object();
    for (std::size_t i = 0; i < fit.params_hat.size(); ++i) {
        params[i < names.size() ? names[i] : "p" + std::to_string(i)] = fit.params_hat[i];
    }
    return {{"params", params},
            {"params_hat", fit.params_hat},
            {"gic", number(fit.gic_at_opt.value)},
            {"n_effective", fit.gic_at_opt.n_effective},
            {"truncation_l", fit.gic_at_opt.truncation_l},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"at_boundary", fit.at_boundary},
            {"optimizer", std::string(to_string(fit.optimizer))},
            {"init_used", fit.init_used},
            {"message", fit.message}};
}

json to_json(const SelectionScan& scan, const std::vector<std::string>& names_at_k) {
    json cands = json::array();
    for (const auto& c : scan.candidates) {
        json vals = json::object();
        for (const auto& [k, v] : c.values) vals[std::string(to_string(k))] = number(v);
        json o = {{"order", c.order},
                  {"param_count", c.param_count},
                  {"excluded", c.excluded},
                  {"gic", number(c.gic.value)},
                  {"values", vals}};
        if (c.fit) o["params_hat"] = c.fit->params_hat;
        if (c.bias) {
            o["bias"] = {{"b", number(c.bias->b_value)},
                         {"condition", number(c.bias->condition)},
                         {"condition_flag", c.bias->condition_flag}};
        }
        if (!c.note.empty()) o["note"] = c.note;
        cands.push_back(std::move(o));
    }
    json sel = json::object();
    for (const auto& [k, v] : scan.selected) sel[std::string(to_string(k))] = v;
    json out = {{"family", scan.family},
                {"truncation_l", scan.truncation_l},
                {"candidates", cands},
                {"selected", sel},
                {"warnings", scan.warnings}};
    if (!names_at_k.empty()) out["parameter_names_at_max_order"] = names_at_k;
    return out;
}

json to_json(std::span<const RuntimeRow> rows) {
    json a = json::array();
    for (const auto& r : rows) {
        a.push_back({{"criterion", std::string(to_string(r.criterion))},
                     {"n", r.n},
                     {"param_dim", r.param_dim},
                     {"median_seconds", r.median_seconds},
                     {"trials", r.trials}});
    }
    return a;
}

json to_json(std::span<const ForecastRow> rows) {
    json a = json::array();
    for (const auto& r : rows) a.push_back({{"model", r.label}, {"mse", number(r.mse)}, {"ratio", number(r.ratio)}});
    return a;
}

json to_json(const MomentSummary& m) {
    return {{"skewness", number(m.skewness)},
            {"excess_kurtosis", number(m.excess_kurtosis)},
            {"se_skewness", number(m.se_skewness)},
            {"se_kurtosis", number(m.se_kurtosis)}};
}

json to_json(const RateDiagnostic& d) {
    return {{"n_small", d.n_small},           {"n_large", d.n_large}, {"median_small", number(d.median_small)},
            {"median_large", number(d.median_large)}, {"ratio", number(d.ratio)}, {"passed", d.passed},
            {"failures", d.failures}};
}

std::string markdown(const ExperimentReport& r) {
    std::ostringstream os;
    os << "# " << to_string(r.config.scenario) << " (" << r.kind << ")\n\n";
    os << "seed " << r.config.master_seed << ", R = " << r.config.replications << ", config " << r.config_hash
       << ", " << r.timestamp << "\n\n";
    if (r.kind == "selection") {
        os << "## Selected orders\n\n";
        std::vector<std::string> head{"n", "criterion"};
        for (std::size_t k = 1; k <= r.config.max_order; ++k) head.push_back(std::to_string(k));
        head.push_back("excluded");
        table_head(os, head);
        for (const auto& s : r.sizes) {
            for (const auto& [c, counts] : s.frequency) {
                std::vector<std::string> row{std::to_string(s.n), std::string(to_string(c))};
                for (auto v : counts) row.push_back(std::to_string(v));
                row.push_back(std::to_string(s.excluded));
                table_row(os, row);
            }
        }
        os << '\n';
    }
    os << "## Estimates at the true order\n\n";
    if (!r.sizes.empty()) {
        std::vector<std::string> head{"n"};
        for (const auto& e : r.sizes.front().estimates) head.push_back(e.name);
        table_head(os, head);
        for (const auto& s : r.sizes) {
            std::vector<std::string> row{std::to_string(s.n)};
            for (const auto& e : s.estimates) {
                row.push_back(fmt(e.mean, 2) + (e.sd ? " (" + fmt(*e.sd, 2) + ")" : " (-)"));
            }
            table_row(os, row);
        }
    }
    return os.str();
}

std::string markdown(const FitResult& fit, const std::vector<std::string>& names) {
    std::ostringstream os;
    table_head(os, {"parameter", "estimate"});
    for (std::size_t i = 0; i < fit.params_hat.size(); ++i) {
        table_row(os, {i < names.size() ? names[i] : "p" + std::to_string(i), fmt(fit.params_hat[i])});
    }
    os << "\nGIC " << fmt(fit.gic_at_opt.value) << " on " << fit.gic_at_opt.n_effective << " terms; "
       << to_string(fit.optimizer) << ", " << fit.iterations << " iterations, "
       << (fit.converged ? "converged" : "not converged") << (fit.at_boundary ? " (at boundary)" : "") << '\n';
    return os.str();
}

std::string markdown(const SelectionScan& scan) {
    std::ostringstream os;
    std::vector<std::string> head{"order", "#params", "GIC"};
    std::vector<Criterion> crits;
    if (!scan.candidates.empty()) {
        for (const auto& [c, v] : scan.candidates.front().values) crits.push_back(c);
    }
    for (auto c : crits) head.push_back(std::string(to_string(c)));
    table_head(os, head);
    for (const auto& c : scan.candidates) {
        std::vector<std::string> row{std::to_string(c.order), std::to_string(c.param_count),
                                     c.excluded ? "excluded" : std::isfinite(c.gic.value) ? fmt(c.gic.value) : "-"};
        for (auto k : crits) {
            auto it = c.values.find(k);
            row.push_back(it == c.values.end() ? "-" : fmt(it->second));
        }
        table_row(os, row);
    }
    os << '\n';
    for (const auto& [c, k] : scan.selected) os << "- " << to_string(c) << " selects order " << k << '\n';
    return os.str();
}

std::string markdown(std::span<const RuntimeRow> rows) {
    std::ostringstream os;
    table_head(os, {"criterion", "n", "h", "median seconds"});
    for (const auto& r : rows) {
        table_row(os, {std::string(to_string(r.criterion)), std::to_string(r.n), std::to_string(r.param_dim),
                       fmt_g(r.median_seconds)});
    }
    return os.str();
}

std::string markdown(std::span<const ForecastRow> rows) {
    std::ostringstream os;
    table_head(os, {"model", "MSE", "ratio"});
    for (const auto& r : rows) table_row(os, {r.label, fmt_g(r.mse), fmt(r.ratio, 3)});
    return os.str();
}

std::string markdown(const MomentSummary& m) {
    std::ostringstream os;
    table_head(os, {"statistic", "value", "SE"});
    table_row(os, {"skewness", fmt(m.skewness, 3), fmt(m.se_skewness, 3)});
    table_row(os, {"excess kurtosis", fmt(m.excess_kurtosis, 3), fmt(m.se_kurtosis, 3)});
    return os.str();
}

std::string markdown(const RateDiagnostic& d) {
    std::ostringstream os;
    table_head(os, {"n", "median |log GIC gap|"});
    table_row(os, {std::to_string(d.n_small), fmt_g(d.median_small)});
    table_row(os, {std::to_string(d.n_large), fmt_g(d.median_large)});
    os << "\nratio " << fmt(d.ratio, 3) << (d.passed ? " <= 0.75: pass" : " > 0.75: fail") << ", " << d.failures
       << " failed replications\n";
    return os.str();
}

}  // namespace micsel::report
