#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "micsel/errors.hpp"
#include "micsel/estimation.hpp"
#include "micsel/models.hpp"
#include "micsel/selection.hpp"
#include "micsel/simulation.hpp"

using namespace micsel;

namespace {

std::vector<CandidateResult> candidates_with(const std::vector<double>& gics, std::size_t n, double scale = 1.0) {
    std::vector<CandidateResult> out;
    for (std::size_t k = 1; k <= gics.size(); ++k) {
        CandidateResult c;
        c.order = k;
        c.param_count = k + 4;
        c.gic = {gics[k - 1] * scale, n, 0};
        c.values[Criterion::mic1] = mic(c.gic, c.param_count, MicVariant::mic1);
        c.values[Criterion::mic2] = mic(c.gic, c.param_count, MicVariant::mic2);
        out.push_back(c);
    }
    return out;
}

}  // namespace

TEST_CASE("MIC factors in closed form") {
    CHECK(mic_factor(MicVariant::mic2, 100, 5) == doctest::Approx(0.79433).epsilon(1e-5));
    CHECK(mic_factor(MicVariant::mic1, 100, 5) == doctest::Approx(0.90484).epsilon(1e-5));
    CHECK(mic_factor(MicVariant::mic2, 100, 5) == std::pow(100.0, -0.05));
    CHECK(mic_factor(MicVariant::mic1, 100, 5) == std::exp(-0.1));

    const GicValue zero{0.0, 250, 0};
    CHECK(mic(zero, 3, MicVariant::mic1) == 0.0);
    CHECK(mic(zero, 3, MicVariant::mic2) == 0.0);

    const GicValue g{1.7, 100, 0};
    CHECK(mic(g, 5, MicVariant::mic2) == 1.7 * std::pow(100.0, -0.05));
    CHECK_THROWS_AS((void)mic(GicValue{1.0, 1, 0}, 3, MicVariant::mic1), ContractError);
    CHECK_THROWS_AS((void)mic(g, 0, MicVariant::mic1), ContractError);
}

TEST_CASE("factor divergence probe") {
    const std::vector<double> grid{std::exp(10.0)};
    CHECK(factor_divergence_probe(MicVariant::mic2, 4, 3, grid)[0].value == doctest::Approx(-10.0).epsilon(1e-12));
    const std::vector<double> many{10.0, 1e3, 1e6, 1e9};
    for (const auto& row : factor_divergence_probe(MicVariant::mic1, 4, 3, many)) {
        CHECK(row.value == doctest::Approx(-2.0).epsilon(1e-12));
    }
    for (const auto& row : factor_divergence_probe(MicVariant::mic2, 5, 5, many)) CHECK(row.value == 0.0);
    for (const auto& row : factor_divergence_probe(MicVariant::mic2, 7, 2, many)) {
        CHECK(row.value == doctest::Approx(-5.0 * std::log(row.n)).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)factor_divergence_probe(MicVariant::mic2, 2, 3, many), ContractError);
}

TEST_CASE("MIC factors tend to one") {
    for (std::size_t k : {1, 4, 14}) {
        for (auto v : {MicVariant::mic1, MicVariant::mic2}) {
            double prev = 0.0;
            for (double n = 100; n <= 1e6; n *= 10) {
                const auto nn = static_cast<std::size_t>(n);
                const double c = mic_factor(v, nn, k);
                CHECK(c > 0.0);
                CHECK(c <= 1.0);
                CHECK(std::abs(c - 1.0) <= 2.0 * k / n * std::max(1.0, std::log(n)));
                CHECK(c > prev);
                prev = c;
            }
        }
    }
}

TEST_CASE("selection is invariant to a common positive scale of GIC") {
    const std::vector<double> gics{1.0, 1.3, 1.41, 1.412, 1.405};
    for (double scale : {0.01, 1.0, 3.0, 1e4}) {
        const auto c = candidates_with(gics, 500, scale);
        CHECK(select_order(c, Criterion::mic2) == select_order(candidates_with(gics, 500), Criterion::mic2));
        CHECK(select_order(c, Criterion::mic1) == select_order(candidates_with(gics, 500), Criterion::mic1));
    }
}

TEST_CASE("ties go to the smaller order") {
    std::vector<CandidateResult> c(3);
    for (std::size_t k = 0; k < 3; ++k) {
        c[k].order = k + 1;
        c[k].values[Criterion::mic2] = 2.0;
        c[k].values[Criterion::aic] = -4.0;
    }
    CHECK(select_order(c, Criterion::mic2) == 1u);
    CHECK(select_order(c, Criterion::aic) == 1u);
    c[0].excluded = true;
    CHECK(select_order(c, Criterion::mic2) == 2u);
    CHECK(maximized(Criterion::gicc));
    CHECK_FALSE(maximized(Criterion::bic));
    CHECK(parse_criterion("mic2") == Criterion::mic2);
    CHECK_THROWS_AS((void)parse_criterion("nic"), ContractError);
}

TEST_CASE("GICc bias for the Gaussian location model") {
    RngStream rng(101, 0);
    std::vector<double> xs(10000);
    for (double& x : xs) x = rng.normal();
    const Dataset d = Dataset::unconditional(1, xs);
    GaussianLocationModel m;
    const FitResult fit = mgice_bfgs(d, m, std::vector<double>{0.0});
    REQUIRE(fit.converged);

    for (bool analytic : {true, false}) {
        const GiccResult r = gicc(d, m, fit, std::nullopt, std::nullopt, analytic);
        CHECK(std::abs(r.bias.b_value - 2.0) <= 0.2);
        CHECK(r.bias.d_hat(0, 0) == doctest::Approx(-2.0).epsilon(1e-4));
        CHECK_FALSE(r.bias.condition_flag);
        // The criterion is n GIC less the bias, nothing else.
        CHECK(r.criterion == 10000.0 * fit.gic_at_opt.value - r.bias.b_value);
    }

    // Two points symmetric about the estimate.
    const Dataset two = Dataset::unconditional(1, {-1.0, 1.0});
    const FitResult f2 = mgice_bfgs(two, m, std::vector<double>{0.3});
    const GiccResult r2 = gicc(two, m, f2);
    CHECK(std::isfinite(r2.bias.b_value));
    CHECK(r2.bias.lambda_hat(0, 0) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("bias matrices are symmetric and PSD") {
    RngStream rng(6, 1);
    const PolyBakerParams truth{{-1.5, 2.0, 5.0}, 3.0, 0.5, 0.5, 1.5};
    const Dataset d = simulate_poly_baker(600, {}, truth, rng);
    PolyBakerModel m(3);
    const FitResult fit = mgice_bfgs(d, m, default_init(d, FamilyTag::poly_baker, 3));
    const BiasEstimate b = estimate_bias(d, m, fit.internal_hat);
    const Eigen::MatrixXd asym = b.lambda_hat - b.lambda_hat.transpose();
    CHECK(asym.cwiseAbs().maxCoeff() <= 1e-10);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b.lambda_hat);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
    CHECK(b.b_value == doctest::Approx(-(b.lambda_hat * b.d_hat.inverse()).trace()).epsilon(1e-8));

    // The closed-form and finite-difference routes agree.
    const BiasEstimate fd = estimate_bias(d, m, fit.internal_hat, std::nullopt, std::nullopt, false);
    CHECK(fd.b_value == doctest::Approx(b.b_value).epsilon(2e-3));
}

TEST_CASE("Gaussian AIC and BIC baselines") {
    // BIC - AIC = #params (log n - 2) exactly.
    RngStream rng(44, 0);
    std::vector<double> wn(300);
    for (double& x : wn) x = rng.normal();
    const SelectionScan s = aic_bic_gaussian(Dataset::timeseries(wn), 5);
    for (const auto& c : s.candidates) {
        const double n = static_cast<double>(c.gic.n_effective);
        CHECK(c.values.at(Criterion::bic) - c.values.at(Criterion::aic) ==
              doctest::Approx(static_cast<double>(c.param_count) * (std::log(n) - 2.0)).epsilon(1e-12));
    }
    CHECK(std::abs(s.candidates[0].fit->params_hat[0]) < 0.2);

    int fewest = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        RngStream r(2718, rep);
        std::vector<double> x(300);
        for (double& v : x) v = r.normal();
        if (aic_bic_gaussian(Dataset::timeseries(x), 5).selected_order(Criterion::bic) == 1) ++fewest;
    }
    CHECK(fewest > 50);

    std::vector<double> xs, ys;
    RngStream r(3, 3);
    for (int i = 0; i < 200; ++i) {
        const double x = -1.0 + 2.0 * r.uniform();
        xs.push_back(x);
        ys.push_back(3.0 - 1.5 * x + 2.0 * x * x + 5.0 * x * x * x + 1e-6 * r.normal());
    }
    CHECK(aic_bic_gaussian(Dataset::regression(xs, ys), 6).selected_order(Criterion::bic) == 3u);

    const std::vector<double> flat(20, 1.0), y2(20, 2.0);
    CHECK_THROWS_AS((void)aic_bic_gaussian(Dataset::regression(flat, y2), 2), ScanError);
    CHECK_THROWS_AS((void)aic_bic_gaussian(Dataset::timeseries({1, 2, 3, 4}), 2), ContractError);
}

TEST_CASE("nested scan on polynomial data") {
    RngStream rng(808, 0);
    const PolyBakerParams truth{{-1.5, 2.0, 5.0}, 3.0, 0.5, 0.5, 1.5};
    const Dataset d = simulate_poly_baker(1000, {}, truth, rng);
    ScanConfig cfg;
    cfg.max_order = 5;
    cfg.criteria = {Criterion::mic1, Criterion::mic2, Criterion::gicc};
    cfg.fit.optimizer = OptimizerKind::adam;
    const SelectionScan scan = scan_nested(d, poly_baker_family(), cfg);
    REQUIRE(scan.candidates.size() == 5);
    CHECK(scan.selected_order(Criterion::mic2) == 3u);
    for (const auto& c : scan.candidates) {
        CHECK_FALSE(c.excluded);
        CHECK(c.param_count == c.order + 4);
    }
    // Larger models never fit worse than the true one.
    for (std::size_t k = 3; k < 5; ++k) {
        CHECK(scan.candidates[k].gic.value >= scan.candidates[2].gic.value - 1e-6);
    }

    ScanConfig bad = cfg;
    bad.criteria = {Criterion::aic};
    CHECK_THROWS_AS((void)scan_nested(d, poly_baker_family(), bad), ContractError);
}

TEST_CASE("AR scans share one window") {
    RngStream rng(99, 5);
    const ArBakerParams truth{{0.5, -0.25, 0.1}, 3.0, 0.5, 0.5, 1.5};
    const Dataset d = simulate_ar_baker(800, truth, rng);
    ScanConfig cfg;
    cfg.max_order = 4;
    const SelectionScan scan = scan_nested(d, ar_baker_family(), cfg);
    CHECK(scan.truncation_l == 4u);
    for (const auto& c : scan.candidates) {
        CHECK(c.gic.truncation_l == 4u);
        CHECK(c.gic.n_effective == 796u);
    }
}

TEST_CASE("von Mises scan picks the dependent model") {
    RngStream rng(4, 4);
    const Dataset d = sample_vonmises2(300, {2.0, 1.0, 1.5, 2.5, 3.0, false}, rng);
    ScanConfig cfg;
    cfg.max_order = 2;
    const SelectionScan scan = scan_nested(d, vonmises_family(), cfg);
    CHECK(scan.selected_order(Criterion::mic1) == 2u);
    CHECK(scan.selected_order(Criterion::mic2) == 2u);
    CHECK(scan.candidates[0].param_count == 4u);
    CHECK(scan.candidates[1].param_count == 5u);
}

TEST_CASE("a scan where every fit fails") {
    // A constant series leaves the least-squares start undefined.
    const Dataset d = Dataset::timeseries(std::vector<double>(50, 1.0));
    ScanConfig cfg;
    cfg.max_order = 2;
    CHECK_THROWS_AS((void)scan_nested(d, ar_baker_family(), cfg), ScanError);
}
