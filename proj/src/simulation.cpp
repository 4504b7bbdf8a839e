#include "micsel/simulation.hpp"

#include <Eigen/Dense>
#include <cassert>
#include <cmath>
#include <numbers>

#include "micsel/errors.hpp"

namespace micsel {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_(master_seed), id_(stream_id) {
    const std::uint64_t a = splitmix64(master_seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(stream_id + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
}

double baker_acceptance_probability(double z, double k) { return std::pow(1.0 + z * z, -k); }

double vonmises_acceptance_probability(double x1, double x2, const VonMisesParams& p) {
    const double d1 = x1 - p.mu1, d2 = x2 - p.mu2;
    const double exponent = p.kappa1 * std::cos(d1) + p.kappa2 * std::cos(d2) + p.lambda * std::sin(d1) * std::sin(d2);
    // |kappa_i| keeps the bound valid for reflected (negative) concentrations.
    return std::exp(exponent - (std::abs(p.kappa1) + std::abs(p.kappa2) + std::abs(p.lambda)));
}

namespace {

double draw_standard_baker(double alpha, double k, RngStream& rng, SamplerStats* stats) {
    const double sd = 1.0 / std::sqrt(alpha);
    for (;;) {
        const double z = sd * rng.normal();
        const double acc = baker_acceptance_probability(z, k);
        assert(acc <= 1.0);
        if (stats) ++stats->proposals;
        if (rng.uniform() < acc) {
            if (stats) ++stats->accepted;
            return z;
        }
    }
}

}  // namespace

std::vector<double> sample_baker(std::size_t n, const BakerParams& p, RngStream& rng, SamplerStats* stats) {
    validate(p);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(p.mu + p.s * draw_standard_baker(p.alpha, p.k, rng, stats));
    return out;
}

bool is_stationary(std::span<const double> a) {
    const auto p = static_cast<Eigen::Index>(a.size());
    if (p == 0) return true;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) companion(0, j) = a[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    const Eigen::VectorXcd eig = companion.eigenvalues();
    double radius = 0.0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) radius = std::max(radius, std::abs(eig(i)));
    return radius < 1.0 - 1e-8;
}

Dataset simulate_ar_baker(std::size_t n_keep, const ArBakerParams& p, RngStream& rng, std::size_t burn_in) {
    validate(p);
    if (n_keep == 0) throw ContractError("simulate_ar_baker needs n_keep >= 1");
    if (!is_stationary(p.a)) throw StationarityError("AR coefficients are not stationary");
    const std::size_t order = p.a.size();
    const std::size_t total = n_keep + burn_in;
    std::vector<double> x(order + total, p.c);
    SamplerStats stats;
    for (std::size_t t = order; t < x.size(); ++t) {
        double v = p.c;
        for (std::size_t j = 1; j <= order; ++j) v += p.a[j - 1] * (x[t - j] - p.c);
        x[t] = v + p.s * draw_standard_baker(p.alpha, p.k, rng, &stats);
    }
    Dataset d = Dataset::timeseries(std::vector<double>(x.end() - static_cast<std::ptrdiff_t>(n_keep), x.end()));
    d.metadata()["acceptance_rate"] = stats.acceptance_rate();
    return d;
}

Dataset simulate_poly_baker(std::size_t n, const DesignRule& design, const PolyBakerParams& p, RngStream& rng) {
    validate(p);
    if (n == 0) throw ContractError("simulate_poly_baker needs n >= 1");
    std::vector<double> xs(n), ys(n);
    SamplerStats stats;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = design.kind == DesignRule::Kind::uniform ? design.a + (design.b - design.a) * rng.uniform()
                                                                  : design.a + design.b * rng.normal();
        if (!std::isfinite(x)) throw ContractError("design rule produced a non-finite x");
        double mean = 0.0, xp = 1.0;
        for (double b : p.beta) {
            xp *= x;
            mean += b * xp;
        }
        xs[i] = x;
        ys[i] = mean + p.c + p.s * draw_standard_baker(p.alpha, p.k, rng, &stats);
    }
    Dataset d = Dataset::regression(xs, ys);
    d.metadata()["acceptance_rate"] = stats.acceptance_rate();
    return d;
}

Dataset sample_vonmises2(std::size_t n, const VonMisesParams& p, RngStream& rng) {
    validate(p);
    if (n == 0) throw ContractError("sample_vonmises2 needs n >= 1");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> flat;
    flat.reserve(2 * n);
    SamplerStats stats;
    while (flat.size() < 2 * n) {
        const double x1 = two_pi * rng.uniform();
        const double x2 = two_pi * rng.uniform();
        const double acc = vonmises_acceptance_probability(x1, x2, p);
        assert(acc <= 1.0 + 1e-12);
        ++stats.proposals;
        if (rng.uniform() < acc) {
            ++stats.accepted;
            flat.push_back(x1);
            flat.push_back(x2);
        }
    }
    Dataset d = Dataset::unconditional(2, std::move(flat));
    d.metadata()["acceptance_rate"] = stats.acceptance_rate();
    return d;
}

}  // namespace micsel
