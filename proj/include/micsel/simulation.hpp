#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "micsel/dataset.hpp"
#include "micsel/models.hpp"

namespace micsel {

/// SplitMix64 finalizer; used to derive per-stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

// One reproducible random stream per replication. The engine seed is derived
// from (master_seed, stream_id) so distinct ids give unrelated sequences.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const noexcept { return master_; }
    std::uint64_t stream_id() const noexcept { return id_; }

    double uniform() { return unit_(engine_); }  // [0, 1)
    double normal() { return normal_(engine_); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t master_;
    std::uint64_t id_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct SamplerStats {
    std::size_t proposals = 0;
    std::size_t accepted = 0;
    double acceptance_rate() const { return proposals ? static_cast<double>(accepted) / proposals : 0.0; }
};

/// (1 + z^2)^(-k): target over the N(0, 1/alpha) proposal kernel.
double baker_acceptance_probability(double z, double k);

/// exp(exponent - (|kappa1| + |kappa2| + |lambda|)).
double vonmises_acceptance_probability(double x1, double x2, const VonMisesParams& p);

std::vector<double> sample_baker(std::size_t n, const BakerParams& p, RngStream& rng, SamplerStats* stats = nullptr);

/// x_t = c + sum_j a_j (x_{t-j} - c) + s eps_t with standardized Baker noise.
/// Initial lags are set to c; the first `burn_in` values are discarded.
Dataset simulate_ar_baker(std::size_t n_keep, const ArBakerParams& p, RngStream& rng, std::size_t burn_in = 200);

/// True when every root of 1 - a_1 z - ... - a_p z^p lies outside the unit
/// circle, checked as companion spectral radius < 1 - 1e-8.
bool is_stationary(std::span<const double> a);

// Covariate draw for polynomial regression; N(0, 1) unless stated.
struct DesignRule {
    enum class Kind { uniform, normal } kind = Kind::normal;
    double a = 0.0;  // uniform: lower bound, normal: mean
    double b = 1.0;  // uniform: upper bound, normal: sd
};

Dataset simulate_poly_baker(std::size_t n, const DesignRule& design, const PolyBakerParams& p, RngStream& rng);

/// Angle pairs in [0, 2*pi)^2 by acceptance-rejection from the uniform square.
Dataset sample_vonmises2(std::size_t n, const VonMisesParams& p, RngStream& rng);

}  // namespace micsel
