#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "micsel/dataset.hpp"
#include "micsel/estimation.hpp"
#include "micsel/models.hpp"
#include "micsel/selection.hpp"
#include "micsel/simulation.hpp"

namespace micsel {

enum class Scenario { baker_fit, ar_select, poly_select, vonmises_select, custom };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view s);

struct ExperimentConfig {
    Scenario scenario = Scenario::custom;
    std::vector<std::size_t> sample_sizes;
    std::size_t replications = 100;
    std::vector<Criterion> criteria;
    std::uint64_t master_seed = 1;
    /// Packed true parameters in the family's layout.
    std::vector<double> true_params;
    /// Candidate range 1..K; the true order is k0.
    std::size_t max_order = 1;
    std::size_t true_order = 1;
    FitOptions fit;
    InitOptions init;
    ShapeBounds bounds;
    DesignRule design;
    std::size_t burn_in = 200;
    /// Worker threads; 0 uses the hardware concurrency.
    std::size_t threads = 0;
};

/// Reference settings for a scenario: true parameters, sample sizes,
/// K, criteria and optimizer.
ExperimentConfig scenario_defaults(Scenario s);

void validate(const ExperimentConfig& cfg);

/// Simulates one dataset of size n for the scenario.
Dataset simulate_scenario(const ExperimentConfig& cfg, std::size_t n, RngStream& rng);

/// Nested candidate family for the scenario.
ModelFamily scenario_family(const ExperimentConfig& cfg);

/// Stream id of replication `rep` at the `size_index`-th sample size.
std::uint64_t replication_stream(std::size_t size_index, std::size_t rep);

struct ReplicationRecord {
    std::size_t n = 0;
    std::size_t replication = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    bool excluded = false;
    std::string error;
    std::map<Criterion, std::size_t> selected;
    std::vector<double> params_hat;
    std::vector<std::string> warnings;
};

struct EstimateRow {
    std::string name;
    double mean = 0.0;
    std::optional<double> sd;  // absent when fewer than two fits
};

struct SizeSummary {
    std::size_t n = 0;
    std::size_t excluded = 0;
    /// criterion -> counts for orders 1..K (index 0 is order 1)
    std::map<Criterion, std::vector<std::size_t>> frequency;
    std::vector<EstimateRow> estimates;
    double seconds = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::string kind;  // "selection" or "estimation"
    std::vector<SizeSummary> sizes;
    std::vector<ReplicationRecord> records;
    std::string config_hash;
    std::string timestamp;
};

/// Simulate, scan 1..K under every criterion, and count selections. Failed
/// replications are recorded and excluded.
ExperimentReport run_selection_experiment(const ExperimentConfig& cfg);

/// Simulate and fit the true order; mean and SD (divisor R-1) per parameter.
ExperimentReport run_estimation_experiment(const ExperimentConfig& cfg);

/// Mean and SD (divisor R-1) of each column.
std::vector<EstimateRow> summarize_estimates(const std::vector<std::vector<double>>& fits,
                                             const std::vector<std::string>& names);

std::string config_hash(const ExperimentConfig& cfg);

// --- penalty runtime --------------------------------------------------------

struct RuntimeRow {
    Criterion criterion = Criterion::mic2;
    std::size_t n = 0;
    std::size_t param_dim = 0;
    double median_seconds = 0.0;
    std::size_t trials = 0;
};

/// Median wall time of the penalty term alone: the MIC factor, or the GICc
/// bias estimate on a fitted AR(h - 2) Gaussian model. Fits are not timed.
std::vector<RuntimeRow> penalty_runtime_bench(std::span<const std::size_t> n_grid,
                                              std::span<const std::size_t> param_dims,
                                              std::span<const Criterion> criteria, std::size_t trials = 11,
                                              std::uint64_t seed = 1);

/// Median time of one row, or nullopt when absent.
std::optional<double> runtime_of(std::span<const RuntimeRow> rows, Criterion c, std::size_t n, std::size_t h);

// --- forecasting -------------------------------------------------------------

/// Forecasts 1..m steps ahead from the end of `history`, with noise at its
/// mean 0. `a` holds a_1..a_p.
std::vector<double> ar_forecast(std::span<const double> history, std::span<const double> a, double c,
                                std::size_t horizon);

struct ForecastModel {
    std::string label;
    std::vector<double> a;
    double c = 0.0;
};

struct ForecastRow {
    std::string label;
    double mse = 0.0;
    double ratio = 1.0;  // mse / mse of the first model
};

/// Rolling m-step forecasts over the last `holdout` values of `series`.
std::vector<ForecastRow> rolling_forecast_mse(std::span<const double> series, std::span<const ForecastModel> models,
                                              std::size_t horizon, std::size_t holdout = 100);

/// (a_1..a_p, c) from an AR-Baker parameter vector (a.., c, s, alpha, k).
ForecastModel forecast_model_from_fit(std::string label, std::span<const double> ar_baker_params);

// --- residual moments ---------------------------------------------------------

struct MomentSummary {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double se_skewness = 0.0;
    double se_kurtosis = 0.0;
};

/// Moment estimators g1 = m3 / m2^1.5 and g2 = m4 / m2^2 - 3.
std::pair<double, double> skewness_kurtosis(std::span<const double> v);

/// Sample moments plus bootstrap SDs over B resamples with replacement.
MomentSummary residual_bootstrap_moments(std::span<const double> residuals, std::size_t resamples, RngStream& rng);

/// Reference moments of the Baker shape: mean and SD of the sample estimates
/// over `replications` draws of size n.
MomentSummary baker_reference_moments(double alpha, double k, std::size_t n, std::size_t replications,
                                      RngStream& rng);

// --- rate diagnostic ----------------------------------------------------------

struct RateDiagnostic {
    std::size_t n_small = 0;
    std::size_t n_large = 0;
    double median_small = 0.0;
    double median_large = 0.0;
    double ratio = 0.0;
    bool passed = false;  // ratio <= 0.75
    std::size_t failures = 0;
};

/// Medians of |log GIC(k0+1) - log GIC(k0)| at two sample sizes. Needs
/// n_large >= 4 n_small, or equal sizes as a control.
RateDiagnostic rate_diagnostic(const ExperimentConfig& cfg, std::size_t n_small, std::size_t n_large,
                               std::size_t replications);

}  // namespace micsel
