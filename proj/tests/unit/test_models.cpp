#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "micsel/errors.hpp"
#include "micsel/models.hpp"
#include "micsel/score_core.hpp"

using namespace micsel;

namespace {

constexpr double kPi = std::numbers::pi;

// Largest FD errors over 100 random (params, obs) draws.
template <class Draw>
FdReport worst_fd(const ScoreModel& m, Draw draw) {
    FdReport worst;
    std::mt19937_64 gen(99);
    for (int i = 0; i < 100; ++i) {
        auto [params, obs] = draw(gen);
        const FdReport r = fd_score_check(m, params, obs, 1e-5);
        worst.grad_err = std::max(worst.grad_err, r.grad_err);
        worst.lap_err = std::max(worst.lap_err, r.lap_err);
    }
    return worst;
}

double uni(std::mt19937_64& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }

}  // namespace

TEST_CASE("Baker scores") {
    const BakerParams p{0.0, 1.0, 0.5, 1.5};
    const auto at0 = baker_score(0.0, p);
    CHECK(at0.grad == 0.0);
    CHECK(at0.laplacian == doctest::Approx(-3.5).epsilon(1e-15));

    const auto at1 = baker_score(1.0, p);
    CHECK(at1.grad == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(at1.laplacian == doctest::Approx(-0.5).epsilon(1e-15));

    // Doubling s halves the gradient and quarters the Laplacian at the same standardized point.
    const BakerParams wide{0.0, 2.0, 0.5, 1.5};
    const auto at2 = baker_score(2.0, wide);
    CHECK(at2.grad == doctest::Approx(at1.grad / 2.0).epsilon(1e-15));
    CHECK(at2.laplacian == doctest::Approx(at1.laplacian / 4.0).epsilon(1e-15));

    CHECK_THROWS_AS(validate(BakerParams{0.0, -1.0, 0.5, 1.5}), ContractError);
    CHECK_THROWS_AS(validate(BakerParams{0.0, 1.0, 0.0, 1.5}), ContractError);
}

TEST_CASE("Baker scores are odd and even about the location") {
    std::mt19937_64 gen(3);
    for (int i = 0; i < 200; ++i) {
        const BakerParams p{uni(gen, -2, 2), uni(gen, 0.2, 3), uni(gen, 0.1, 2), uni(gen, 0.1, 4)};
        const double d = uni(gen, 0, 5);
        const auto up = baker_score(p.mu + d, p);
        const auto dn = baker_score(p.mu - d, p);
        CHECK(up.grad == doctest::Approx(-dn.grad).epsilon(1e-12));
        CHECK(up.laplacian == doctest::Approx(dn.laplacian).epsilon(1e-12));
    }
}

TEST_CASE("AR-Baker scores") {
    const BakerParams b{0.0, 1.0, 0.5, 1.5};
    const ArBakerParams zero{{0.0}, 0.0, 1.0, 0.5, 1.5};
    for (double xt : {-2.0, 0.0, 0.3, 4.0}) {
        const std::vector<double> w{7.0, xt};
        const auto a = ar_baker_score(w, zero);
        const auto u = baker_score(xt, b);
        CHECK(a.grad == u.grad);
        CHECK(a.laplacian == u.laplacian);
    }

    // x_t - c equals the conditional mean: zero residual.
    const ArBakerParams truth{{0.5, -0.25, 0.1}, 3.0, 0.5, 0.5, 1.5};
    const std::vector<double> lags{3.4, 2.2, 4.0};  // x_{t-3}, x_{t-2}, x_{t-1}
    const double mu = 0.5 * (4.0 - 3.0) - 0.25 * (2.2 - 3.0) + 0.1 * (3.4 - 3.0);
    const std::vector<double> w{3.4, 2.2, 4.0, 3.0 + mu};
    CHECK(std::abs(ar_baker_score(w, truth).grad) <= 1e-12);
    CHECK(ar_baker_score(std::vector<double>{3.0, 3.0, 3.0, 3.0}, truth).grad == 0.0);

    CHECK_THROWS_AS((void)ar_baker_score(std::vector<double>{1.0, 2.0}, truth), ContractError);
}

TEST_CASE("polynomial Baker scores") {
    const PolyBakerParams zero{{0.0, 0.0}, 0.0, 1.0, 0.5, 1.5};
    const auto a = poly_baker_score(2.0, 1.0, zero);
    const auto u = baker_score(1.0, BakerParams{0.0, 1.0, 0.5, 1.5});
    CHECK(a.grad == u.grad);
    CHECK(a.laplacian == u.laplacian);

    const PolyBakerParams truth{{-1.5, 2.0, 5.0}, 3.0, 0.5, 0.5, 1.5};
    CHECK(poly_baker_score(0.0, 3.0, truth).grad == 0.0);
    // Conditional mean at x = 1 is -1.5 + 2 + 5 + 3.
    CHECK(poly_baker_score(1.0, 8.5, truth).grad == 0.0);

    // A zero leading coefficient reproduces the lower-degree model.
    std::mt19937_64 gen(8);
    for (int i = 0; i < 100; ++i) {
        const PolyBakerParams low{{uni(gen, -2, 2), uni(gen, -2, 2)}, uni(gen, -1, 1), 0.7, 0.4, 1.3};
        PolyBakerParams high = low;
        high.beta.push_back(0.0);
        const double x = uni(gen, -2, 2), y = uni(gen, -5, 5);
        const auto l = poly_baker_score(x, y, low);
        const auto h = poly_baker_score(x, y, high);
        CHECK(l.grad == h.grad);
        CHECK(l.laplacian == h.laplacian);
    }
}

TEST_CASE("von Mises scores") {
    const VonMisesParams p{2.0, 1.0, 1.5, 2.5, 3.0, false};
    const auto mode = vonmises_score(1.5, 2.5, p);
    CHECK(mode.grad[0] == 0.0);
    CHECK(mode.grad[1] == 0.0);
    CHECK(mode.laplacian_sum == doctest::Approx(-3.0).epsilon(1e-15));

    const auto s = vonmises_score(1.5 + kPi / 2.0, 2.5, p);
    CHECK(s.grad[0] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(s.grad[1] == doctest::Approx(3.0).epsilon(1e-14));

    // lambda = 0 decouples into two univariate scores.
    const VonMisesParams ind{2.0, 1.0, 1.5, 2.5, 0.0, true};
    const auto d = vonmises_score(0.4, 5.1, ind);
    CHECK(d.grad[0] == doctest::Approx(-2.0 * std::sin(0.4 - 1.5)).epsilon(1e-15));
    CHECK(d.grad[1] == doctest::Approx(-1.0 * std::sin(5.1 - 2.5)).epsilon(1e-15));

    std::mt19937_64 gen(21);
    for (int i = 0; i < 100; ++i) {
        const double x1 = uni(gen, 0, 2 * kPi), x2 = uni(gen, 0, 2 * kPi);
        const auto base = vonmises_score(x1, x2, p);
        const auto s1 = vonmises_score(x1 + 2 * kPi, x2, p);
        const auto s2 = vonmises_score(x1, x2 - 2 * kPi, p);
        for (const auto& t : {s1, s2}) {
            CHECK(t.grad[0] == doctest::Approx(base.grad[0]).epsilon(1e-12).scale(1.0));
            CHECK(t.grad[1] == doctest::Approx(base.grad[1]).epsilon(1e-12).scale(1.0));
            CHECK(t.laplacian_sum == doctest::Approx(base.laplacian_sum).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("Gaussian location scores") {
    CHECK(gaussian_location_score(0.0, 0.0, 1.0).grad == 0.0);
    const auto s = gaussian_location_score(1.0, 0.0, 1.0);
    CHECK(-s.grad * s.grad - 2.0 * s.laplacian == 1.0);
    const auto t = gaussian_location_score(3.0, 1.0, 2.0);
    CHECK(t.grad == doctest::Approx(-0.5));
    CHECK(t.laplacian == doctest::Approx(-0.25));
}

TEST_CASE("every family agrees with finite differences") {
    BakerModel baker;
    auto r = worst_fd(baker, [](std::mt19937_64& g) {
        std::vector<double> p{uni(g, -2, 2), uni(g, 0.3, 3), uni(g, 0.1, 2), uni(g, 0.2, 4)};
        std::vector<double> o{p[0] + p[1] * uni(g, -4, 4)};
        return std::pair{p, o};
    });
    CHECK(r.grad_err <= 1e-6);
    CHECK(r.lap_err <= 1e-6);

    ArBakerModel ar(3);
    r = worst_fd(ar, [](std::mt19937_64& g) {
        std::vector<double> p{uni(g, -0.6, 0.6), uni(g, -0.3, 0.3), uni(g, -0.2, 0.2), uni(g, -3, 3),
                              uni(g, 0.3, 2), uni(g, 0.1, 2), uni(g, 0.2, 4)};
        std::vector<double> o{uni(g, -4, 4), uni(g, -4, 4), uni(g, -4, 4), uni(g, -5, 5)};
        return std::pair{p, o};
    });
    CHECK(r.grad_err <= 1e-6);
    CHECK(r.lap_err <= 1e-6);

    PolyBakerModel poly(3);
    r = worst_fd(poly, [](std::mt19937_64& g) {
        std::vector<double> p{uni(g, -2, 2), uni(g, -2, 2), uni(g, -5, 5), uni(g, -3, 3),
                              uni(g, 0.3, 2), uni(g, 0.1, 2), uni(g, 0.2, 4)};
        std::vector<double> o{uni(g, -1.5, 1.5), uni(g, -8, 8)};
        return std::pair{p, o};
    });
    CHECK(r.grad_err <= 1e-6);
    CHECK(r.lap_err <= 1e-6);

    VonMisesModel vm(true);
    r = worst_fd(vm, [](std::mt19937_64& g) {
        std::vector<double> p{uni(g, 0, 4), uni(g, 0, 4), uni(g, 0, 2 * kPi), uni(g, 0, 2 * kPi), uni(g, -3, 3)};
        std::vector<double> o{uni(g, 0, 2 * kPi), uni(g, 0, 2 * kPi)};
        return std::pair{p, o};
    });
    CHECK(r.grad_err <= 1e-6);
    CHECK(r.lap_err <= 1e-6);
}

TEST_CASE("closed-form parameter gradients of W match finite differences") {
    std::mt19937_64 gen(4);
    BakerModel baker;
    ArBakerModel ar(2);
    PolyBakerModel poly(2);
    VonMisesModel vm(true);
    GaussianLocationModel gl(1.3);
    struct Case {
        const ScoreModel* m;
        std::vector<double> params, obs;
    };
    for (int i = 0; i < 25; ++i) {
        std::vector<Case> cases{
            {&baker, {uni(gen, -1, 1), uni(gen, 0.5, 2), uni(gen, 0.2, 2), uni(gen, 0.3, 3)}, {uni(gen, -3, 3)}},
            {&ar,
             {uni(gen, -0.5, 0.5), uni(gen, -0.3, 0.3), uni(gen, -1, 1), uni(gen, 0.5, 2), uni(gen, 0.2, 2),
              uni(gen, 0.3, 3)},
             {uni(gen, -2, 2), uni(gen, -2, 2), uni(gen, -3, 3)}},
            {&poly,
             {uni(gen, -1, 1), uni(gen, -1, 1), uni(gen, -1, 1), uni(gen, 0.5, 2), uni(gen, 0.2, 2), uni(gen, 0.3, 3)},
             {uni(gen, -1, 1), uni(gen, -3, 3)}},
            {&vm, {uni(gen, 0, 3), uni(gen, 0, 3), uni(gen, 0, 6), uni(gen, 0, 6), uni(gen, -2, 2)},
             {uni(gen, 0, 6), uni(gen, 0, 6)}},
            {&gl, {uni(gen, -2, 2)}, {uni(gen, -3, 3)}},
        };
        for (Case& c : cases) {
            std::vector<double> dw(c.params.size());
            const double w = c.m->w_param_gradient(c.obs, c.params, dw);
            CHECK(w == doctest::Approx(w_objective(c.obs, *c.m, c.params).w).epsilon(1e-12));
            for (std::size_t j = 0; j < c.params.size(); ++j) {
                const double h = 1e-5 * (1.0 + std::abs(c.params[j]));
                auto up = c.params, dn = c.params;
                up[j] += h;
                dn[j] -= h;
                const double fd = (w_objective(c.obs, *c.m, up).w - w_objective(c.obs, *c.m, dn).w) / (2 * h);
                CHECK(dw[j] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            }
        }
    }
}
