#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "micsel/errors.hpp"
#include "micsel/estimation.hpp"
#include "micsel/simulation.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace micsel;
using micsel::testing::BakerCdf;
using micsel::testing::sample_mean;
using micsel::testing::sample_sd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double skewness(std::span<const double> v) {
    const double m = sample_mean(v);
    double m2 = 0.0, m3 = 0.0;
    for (double x : v) {
        m2 += (x - m) * (x - m);
        m3 += (x - m) * (x - m) * (x - m);
    }
    m2 /= static_cast<double>(v.size());
    m3 /= static_cast<double>(v.size());
    return m3 / std::pow(m2, 1.5);
}

double variance(std::span<const double> v) {
    const double s = sample_sd(v);
    return s * s;
}

}  // namespace

TEST_CASE("acceptance probabilities") {
    CHECK(baker_acceptance_probability(0.0, 1.5) == 1.0);
    CHECK(baker_acceptance_probability(1.0, 1.5) == doctest::Approx(0.35355).epsilon(1e-5));
    CHECK(baker_acceptance_probability(1.0, 1.5) == doctest::Approx(std::pow(2.0, -1.5)));

    const VonMisesParams flat{0.0, 0.0, 0.0, 0.0, 0.0, false};
    CHECK(vonmises_acceptance_probability(0.3, 5.0, flat) == 1.0);
    const VonMisesParams p{2.0, 1.0, 1.5, 2.5, 0.0, false};
    CHECK(vonmises_acceptance_probability(1.5, 2.5, p) == 1.0);
}

TEST_CASE("acceptance ratios never exceed one") {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> z(-50.0, 50.0), kk(1e-3, 20.0), ang(-10.0, 10.0), conc(-5.0, 5.0);
    for (int i = 0; i < 20000; ++i) {
        const double a = baker_acceptance_probability(z(g), kk(g));
        CHECK(a <= 1.0);
        CHECK(a > 0.0);
        const VonMisesParams p{conc(g), conc(g), ang(g), ang(g), conc(g), false};
        const double b = vonmises_acceptance_probability(ang(g), ang(g), p);
        CHECK(b <= 1.0 + 1e-12);
        CHECK(b > 0.0);
    }
}

TEST_CASE("streams are reproducible and distinct") {
    const BakerParams p{0.3, 0.5, 0.5, 1.5};
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    const auto xa = sample_baker(500, p, a);
    const auto xb = sample_baker(500, p, b);
    const auto xc = sample_baker(500, p, c);
    const auto xd = sample_baker(500, p, d);
    CHECK(xa == xb);
    CHECK(xa != xc);
    CHECK(xa != xd);
    CHECK(a.master_seed() == 42u);
    CHECK(a.stream_id() == 7u);

    RngStream e(5, 1), f(5, 1);
    const ArBakerParams ar{{0.5, -0.25, 0.1}, 3.0, 0.5, 0.5, 1.5};
    CHECK(simulate_ar_baker(300, ar, e) == simulate_ar_baker(300, ar, f));
}

TEST_CASE("Baker sampler matches the quadrature CDF") {
    const BakerParams p{0.3, 0.5, 0.5, 1.5};
    RngStream rng(2024, 0);
    SamplerStats stats;
    std::vector<double> x = sample_baker(10000, p, rng, &stats);
    CHECK(stats.accepted == 10000u);
    CHECK(stats.proposals >= stats.accepted);

    CHECK(micsel::testing::baker_ks(x, p) <= 0.02);

    // Expected acceptance rate is the ratio of normalizers.
    const BakerCdf cdf(p.alpha, p.k);
    const double expected = cdf.z / std::sqrt(kTwoPi / p.alpha);
    CHECK(stats.acceptance_rate() == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("Baker draws are symmetric") {
    RngStream rng(3, 3);
    const std::vector<double> z = sample_baker(100000, BakerParams{0.0, 1.0, 0.5, 1.5}, rng);
    // Standard error of the skewness from 20 independent blocks.
    std::vector<double> block;
    for (std::size_t b = 0; b < 20; ++b) {
        block.push_back(skewness(std::span<const double>(z).subspan(b * 5000, 5000)));
    }
    const double se = sample_sd(block) / std::sqrt(20.0);
    CHECK(std::abs(skewness(z)) <= 3.0 * se);
}

TEST_CASE("AR simulator") {
    SUBCASE("a = 0 gives IID Baker draws") {
        RngStream r1(8, 1), r2(8, 1);
        const Dataset d = simulate_ar_baker(400, ArBakerParams{{0.0}, 3.0, 0.5, 0.5, 1.5}, r1, 0);
        const std::vector<double> iid = sample_baker(400, BakerParams{3.0, 0.5, 0.5, 1.5}, r2);
        const auto v = d.values();
        CHECK(std::equal(v.begin(), v.end(), iid.begin(), iid.end()));
    }
    SUBCASE("without burn-in the first value is c + s eps") {
        RngStream r1(9, 2), r2(9, 2);
        const Dataset d = simulate_ar_baker(5, ArBakerParams{{0.5, -0.25, 0.1}, 3.0, 0.5, 0.5, 1.5}, r1, 0);
        const std::vector<double> first = sample_baker(1, BakerParams{3.0, 0.5, 0.5, 1.5}, r2);
        CHECK(d.values()[0] == first[0]);
    }
    SUBCASE("non-stationary coefficients are rejected") {
        RngStream r(1, 1);
        CHECK_THROWS_AS((void)simulate_ar_baker(10, ArBakerParams{{1.0}, 0.0, 1.0, 1.0, 1.0}, r), StationarityError);
        CHECK_THROWS_AS((void)simulate_ar_baker(10, ArBakerParams{{0.5, 0.6}, 0.0, 1.0, 1.0, 1.0}, r),
                        StationarityError);
        CHECK(is_stationary(std::vector<double>{0.5, -0.25, 0.1}));
        CHECK_FALSE(is_stationary(std::vector<double>{-1.0}));
        CHECK(is_stationary(std::vector<double>{}));
    }
    SUBCASE("mean and stationarity across replications") {
        const ArBakerParams p{{0.5, -0.25, 0.1}, 3.0, 0.5, 0.5, 1.5};
        std::vector<double> means, dvar;
        for (std::uint64_t r = 0; r < 40; ++r) {
            RngStream rng(77, r);
            const Dataset d = simulate_ar_baker(3000, p, rng);
            const auto v = d.values();
            means.push_back(sample_mean(v));
            dvar.push_back(variance(v.first(600)) - variance(v.last(600)));
            CHECK(d.metadata().at("acceptance_rate") > 0.0);
        }
        const double se = sample_sd(means);
        CHECK(std::abs(means[0] - 3.0) <= 3.0 * se);
        CHECK(std::abs(sample_mean(means) - 3.0) <= 3.0 * se / std::sqrt(40.0));
        CHECK(std::abs(sample_mean(dvar)) <= 3.0 * sample_sd(dvar) / std::sqrt(40.0));
    }
}

TEST_CASE("polynomial simulator") {
    const PolyBakerParams p{{-1.5, 2.0, 5.0}, 3.0, 1e-12, 0.5, 1.5};
    RngStream rng(4, 4);
    const Dataset d = simulate_poly_baker(200, {}, p, rng);
    const auto x = d.column(0), y = d.column(1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double mean = -1.5 * x[i] + 2.0 * x[i] * x[i] + 5.0 * x[i] * x[i] * x[i] + 3.0;
        CHECK(std::abs(y[i] - mean) < 1e-9);
    }
    const std::vector<double> ls = least_squares_poly(x, y, 3);
    CHECK(ls.back() < 1e-9);
    CHECK(ls[2] == doctest::Approx(5.0).epsilon(1e-9));

    DesignRule unif;
    unif.kind = DesignRule::Kind::uniform;
    unif.a = -1.0;
    unif.b = 1.0;
    RngStream r2(4, 5);
    const auto xu = simulate_poly_baker(1000, unif, p, r2).column(0);
    CHECK(*std::min_element(xu.begin(), xu.end()) >= -1.0);
    CHECK(*std::max_element(xu.begin(), xu.end()) < 1.0);

    DesignRule bad;
    bad.b = std::nan("");
    CHECK_THROWS_AS((void)simulate_poly_baker(3, bad, p, r2), ContractError);
}

TEST_CASE("von Mises sampler") {
    SUBCASE("zero concentration is the uniform proposal") {
        RngStream r1(6, 0), r2(6, 0);
        const Dataset d = sample_vonmises2(300, VonMisesParams{0.0, 0.0, 1.0, 2.0, 0.0, false}, r1);
        CHECK(d.metadata().at("acceptance_rate") == 1.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double u1 = kTwoPi * r2.uniform();
            const double u2 = kTwoPi * r2.uniform();
            (void)r2.uniform();
            CHECK(d.row(i)[0] == u1);
            CHECK(d.row(i)[1] == u2);
        }
    }
    SUBCASE("16 x 16 histogram against quadrature cell masses") {
        const VonMisesParams p{2.0, 1.0, 1.5, 2.5, 3.0, false};
        RngStream rng(31, 0);
        const Dataset d = sample_vonmises2(10000, p, rng);
        constexpr int kBins = 16;
        const double chi2 = micsel::testing::vonmises_cell_chi2(d, p, kBins);
        const boost::math::chi_squared dist(kBins * kBins - 1);
        CHECK(chi2 <= boost::math::quantile(dist, 0.99));
    }
}
