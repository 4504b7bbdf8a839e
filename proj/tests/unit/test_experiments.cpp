#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "micsel/errors.hpp"
#include "micsel/experiments.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace micsel;
using micsel::testing::baker_excess_kurtosis;
using micsel::testing::sample_mean;
using micsel::testing::sample_sd;

namespace {

ExperimentConfig small_ar() {
    ExperimentConfig c = scenario_defaults(Scenario::ar_select);
    c.sample_sizes = {300, 400};
    c.replications = 4;
    c.max_order = 4;
    c.criteria = {Criterion::mic1, Criterion::mic2};
    c.master_seed = 17;
    return c;
}

}  // namespace

TEST_CASE("scenario names round-trip") {
    for (Scenario s : {Scenario::baker_fit, Scenario::ar_select, Scenario::poly_select, Scenario::vonmises_select}) {
        CHECK(parse_scenario(to_string(s)) == s);
    }
    CHECK(parse_scenario("ar-select") == Scenario::ar_select);
    CHECK_THROWS_AS(parse_scenario("arma"), ContractError);
}

TEST_CASE("validation rejects bad configs") {
    ExperimentConfig c = scenario_defaults(Scenario::ar_select);
    c.true_order = 11;
    CHECK_THROWS_AS(validate(c), ContractError);
    c = scenario_defaults(Scenario::ar_select);
    c.replications = 0;
    CHECK_THROWS_AS(validate(c), ContractError);
    CHECK_THROWS_AS(validate(scenario_defaults(Scenario::custom)), ContractError);
}

TEST_CASE("AR forecasts follow the mean recursion") {
    const std::vector<double> hist{2.0};
    const std::vector<double> a{0.5};
    const auto f = ar_forecast(hist, a, 0.0, 2);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == doctest::Approx(1.0));
    CHECK(f[1] == doctest::Approx(0.5));

    const std::vector<double> zero{0.0};
    for (double v : ar_forecast(std::vector<double>{5.0, -3.0}, zero, 1.7, 4)) CHECK(v == 1.7);

    CHECK_THROWS_AS(ar_forecast(hist, a, 0.0, 0), ContractError);
    CHECK_THROWS_AS(ar_forecast(hist, std::vector<double>{0.1, 0.2}, 0.0, 1), ContractError);
}

TEST_CASE("property: an m-step forecast equals m chained one-step forecasts") {
    RngStream rng(3, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<double> a{rng.uniform() - 0.5, 0.4 * (rng.uniform() - 0.5)};
        const double c = rng.normal();
        std::vector<double> hist{rng.normal(), rng.normal(), rng.normal()};
        const auto direct = ar_forecast(hist, a, c, 5);
        for (int m = 0; m < 5; ++m) {
            const double one = ar_forecast(hist, a, c, 1)[0];
            CHECK(one == doctest::Approx(direct[m]).epsilon(1e-12));
            hist.push_back(one);
        }
    }
}

TEST_CASE("rolling forecast MSE") {
    // Noiseless AR(1) around c = 2: the true model forecasts exactly.
    std::vector<double> series{5.0};
    for (int t = 1; t < 150; ++t) series.push_back(2.0 + 0.8 * (series.back() - 2.0));
    const std::vector<ForecastModel> models{{"true", {0.8}, 2.0}, {"flat", {0.0}, 2.0}};
    const auto rows = rolling_forecast_mse(series, models, 3, 50);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mse == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(rows[1].mse > 0.0);
    // First-model ratio is 1 whenever its MSE is positive.
    const std::vector<ForecastModel> swapped{models[1], models[0]};
    const auto rows2 = rolling_forecast_mse(series, swapped, 3, 50);
    CHECK(rows2[0].ratio == 1.0);
    CHECK(rows2[1].ratio == doctest::Approx(0.0));

    // Independent oracle for the flat model: mean squared gap to c.
    double ss = 0.0;
    for (std::size_t t = 100; t < 150; ++t) ss += (series[t] - 2.0) * (series[t] - 2.0);
    CHECK(rows[1].mse == doctest::Approx(ss / 50.0));

    CHECK_THROWS_AS(rolling_forecast_mse(series, models, 0, 50), ContractError);
    CHECK_THROWS_AS(rolling_forecast_mse(series, models, 1, 150), ContractError);
}

TEST_CASE("forecast model from AR-Baker parameters") {
    const std::vector<double> p{0.5, -0.25, 0.1, 3.0, 0.5, 0.5, 1.5};
    const auto m = forecast_model_from_fit("AR(3)", p);
    CHECK(m.a == std::vector<double>{0.5, -0.25, 0.1});
    CHECK(m.c == 3.0);
    CHECK_THROWS_AS(forecast_model_from_fit("x", std::vector<double>{1, 2, 3, 4}), ContractError);
}

TEST_CASE("moment estimators") {
    const auto [s, k] = skewness_kurtosis(std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(s == doctest::Approx(0.0));
    CHECK(k == doctest::Approx(-1.5));  // m2 = m4 = 2/3
    CHECK_THROWS_AS(skewness_kurtosis(std::vector<double>(5, 2.0)), MomentError);
}

TEST_CASE("bootstrap moments of Gaussian residuals") {
    RngStream rng(5, 1);
    std::vector<double> r(2000);
    for (double& v : r) v = rng.normal();
    const auto m = residual_bootstrap_moments(r, 1000, rng);
    CHECK(std::abs(m.excess_kurtosis) < 3.0 * m.se_kurtosis);
    CHECK(std::abs(m.skewness) < 3.0 * m.se_skewness);
    // Large-sample SEs: sqrt(6/n) and sqrt(24/n).
    CHECK(m.se_skewness == doctest::Approx(std::sqrt(6.0 / 2000)).epsilon(0.25));
    CHECK(m.se_kurtosis == doctest::Approx(std::sqrt(24.0 / 2000)).epsilon(0.25));

    CHECK_THROWS_AS(residual_bootstrap_moments(std::vector<double>(7, 1.0), 100, rng), ContractError);
    CHECK_THROWS_AS(residual_bootstrap_moments(std::vector<double>(10, 1.0), 100, rng), MomentError);
}

TEST_CASE("Baker reference kurtosis agrees with quadrature") {
    const double alpha = 0.4973, k = 3.2389;
    const double exact = baker_excess_kurtosis(alpha, k);
    RngStream rng(6, 2);
    const auto m = baker_reference_moments(alpha, k, 4000, 40, rng);
    CHECK(std::abs(m.skewness) < 4.0 * m.se_skewness / std::sqrt(40.0));
    // Sample kurtosis is biased low at finite n; allow that on top of 4 SE.
    CHECK(std::abs(m.excess_kurtosis - exact) < 4.0 * m.se_kurtosis / std::sqrt(40.0) + 0.05);
}

TEST_CASE("Baker shape fitted to the car data has the reported reference kurtosis") {
    // Reported: 1.29 with simulation SE 0.21 at alpha = 0.4973, k = 3.2389.
    CHECK(std::abs(baker_excess_kurtosis(0.4973, 3.2389) - 1.29) <= 0.21);
}

TEST_CASE("estimate summaries use divisor R-1 and drop the SD at R = 1") {
    const auto one = summarize_estimates({{1.0, 2.0}}, {"a", "b"});
    CHECK(one[0].mean == 1.0);
    CHECK_FALSE(one[0].sd.has_value());

    const std::vector<std::vector<double>> fits{{1.0}, {2.0}, {4.0}};
    const auto rows = summarize_estimates(fits, {"a"});
    const std::vector<double> col{1.0, 2.0, 4.0};
    CHECK(rows[0].mean == doctest::Approx(sample_mean(col)));
    REQUIRE(rows[0].sd.has_value());
    CHECK(*rows[0].sd == doctest::Approx(sample_sd(col)));
}

TEST_CASE("config hash is stable and sensitive") {
    ExperimentConfig c = small_ar();
    const std::string h = config_hash(c);
    CHECK(h.size() == 16);
    CHECK(config_hash(c) == h);
    c.master_seed += 1;
    CHECK(config_hash(c) != h);
}

TEST_CASE("selection experiment: conservation, lineage and determinism") {
    ExperimentConfig c = small_ar();
    c.threads = 1;
    const auto serial = run_selection_experiment(c);
    c.threads = 3;
    const auto pooled = run_selection_experiment(c);

    REQUIRE(serial.sizes.size() == 2);
    REQUIRE(serial.records.size() == 8);
    for (std::size_t si = 0; si < serial.sizes.size(); ++si) {
        const auto& s = serial.sizes[si];
        for (Criterion crit : c.criteria) {
            const auto& f = s.frequency.at(crit);
            CHECK(f.size() == c.max_order);
            CHECK(std::accumulate(f.begin(), f.end(), std::size_t{0}) == c.replications - s.excluded);
        }
        CHECK(s.frequency == pooled.sizes[si].frequency);
    }
    for (std::size_t i = 0; i < serial.records.size(); ++i) {
        const auto& r = serial.records[i];
        CHECK(r.master_seed == 17);
        CHECK(r.stream_id == replication_stream(i / 4, i % 4));
        CHECK(r.selected == pooled.records[i].selected);
        CHECK(r.params_hat == pooled.records[i].params_hat);
    }
}

TEST_CASE("estimation experiment on the AR scenario") {
    ExperimentConfig c = scenario_defaults(Scenario::ar_select);
    c.sample_sizes = {2000};
    c.replications = 1;
    c.max_order = 3;
    const auto rep = run_estimation_experiment(c);
    REQUIRE(rep.sizes.size() == 1);
    const auto& est = rep.sizes[0].estimates;
    REQUIRE(est.size() == 7);
    CHECK_FALSE(est[0].sd.has_value());
    CHECK(est[0].name == "a1");
    CHECK(est[0].mean == doctest::Approx(0.5).epsilon(0.1 / 0.5));
    CHECK(est[3].mean == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("runtime bench covers the grid and the GICc penalty grows with n") {
    const std::vector<std::size_t> ns{500, 8000};
    const std::vector<std::size_t> hs{3};
    const std::vector<Criterion> cs{Criterion::mic2, Criterion::gicc};
    const auto rows = penalty_runtime_bench(ns, hs, cs, 5);
    CHECK(rows.size() == 4);
    const auto small = runtime_of(rows, Criterion::gicc, 500, 3);
    const auto large = runtime_of(rows, Criterion::gicc, 8000, 3);
    REQUIRE(small);
    REQUIRE(large);
    CHECK(*large > *small);
    CHECK(*runtime_of(rows, Criterion::mic2, 8000, 3) < *large);
    CHECK_FALSE(runtime_of(rows, Criterion::mic1, 500, 3).has_value());

    const std::vector<std::size_t> bad{2};
    CHECK_THROWS_AS(penalty_runtime_bench(ns, bad, cs, 1), ContractError);
}

TEST_CASE("rate diagnostic preconditions") {
    ExperimentConfig c = small_ar();
    c.true_order = c.max_order;
    CHECK_THROWS_AS(rate_diagnostic(c, 300, 600, 2), ContractError);
    c = small_ar();
    const auto d = rate_diagnostic(c, 400, 400, 3);
    CHECK(d.median_small > 0.0);
    CHECK(std::isfinite(d.ratio));
}

TEST_CASE("rate diagnostic rejects a small size gap") {
    CHECK_THROWS_AS(rate_diagnostic(small_ar(), 300, 600, 2), ContractError);
}

TEST_CASE("true-order AR forecasts beat AR(1) in most replications") {
    ExperimentConfig c = scenario_defaults(Scenario::ar_select);
    const auto family = scenario_family(c);
    int wins = 0;
    for (std::size_t r = 0; r < 100; ++r) {
        RngStream rng(21, r);
        const Dataset data = simulate_scenario(c, 1100, rng);
        const std::vector<double> all(data.values().begin(), data.values().end());
        const Dataset train = Dataset::timeseries(std::vector<double>(all.begin(), all.begin() + 1000));
        std::vector<ForecastModel> models;
        for (std::size_t p : {3u, 1u}) {
            const auto model = family.build(p);
            const FitResult f = mgice(train, *model, family.initial(train, p), c.fit);
            models.push_back(forecast_model_from_fit("AR(" + std::to_string(p) + ")", f.params_hat));
        }
        const auto rows = rolling_forecast_mse(all, models, 1, 100);
        if (rows[0].mse <= rows[1].mse) ++wins;
    }
    CHECK(wins >= 70);
}
