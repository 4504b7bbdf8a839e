#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "micsel/dataset.hpp"
#include "micsel/estimation.hpp"
#include "micsel/models.hpp"
#include "micsel/score_core.hpp"
#include "micsel/score_model.hpp"

namespace micsel {

enum class MicVariant { mic1, mic2 };
enum class Criterion { mic1, mic2, gicc, aic, bic };

std::string_view to_string(MicVariant v);
std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view s);

/// True for criteria that are maximized (MIC, GICc); AIC/BIC are minimized.
bool maximized(Criterion c);

/// C(n, k): exp(-2k/n) for mic1, n^(-k/n) for mic2.
double mic_factor(MicVariant v, std::size_t n_effective, std::size_t param_count);

/// C(n_effective, #(M_k)) * GIC.
double mic(const GicValue& gic_val, std::size_t param_count, MicVariant v);

struct DivergenceRow {
    double n;
    double value;  // n * log(C(n, k1) / C(n, k2))
};

/// Tabulates n log(C(n,k1)/C(n,k2)) over `n_grid`. Requires k1 >= k2 >= 1.
std::vector<DivergenceRow> factor_divergence_probe(MicVariant v, std::size_t k1, std::size_t k2,
                                                   std::span<const double> n_grid);

struct BiasEstimate {
    Eigen::MatrixXd lambda_hat;  // mean of grad W grad W'
    Eigen::MatrixXd d_hat;       // mean of Hessian of W
    double b_value = 0.0;        // -trace(lambda_hat * d_hat^{-1})
    double condition = 0.0;
    bool condition_flag = false;
};

struct GiccResult {
    double criterion = 0.0;  // n * GIC - B
    BiasEstimate bias;
};

/// Bias-corrected criterion. Derivatives of W are taken in the optimizer's
/// coordinates by central differences (of W, or of the closed-form gradient
/// when the family has one). `fd_step` overrides the per-coordinate step.
/// Throws BiasError when the averaged Hessian is singular.
GiccResult gicc(const Dataset& data, const ScoreModel& model, const FitResult& fit,
                std::optional<double> fd_step = std::nullopt, std::optional<std::size_t> truncation_l = std::nullopt,
                bool analytic_gradient = true);

/// Only the bias part of gicc; exposed for runtime benchmarking.
BiasEstimate estimate_bias(const Dataset& data, const ScoreModel& model, std::span<const double> internal_hat,
                           std::optional<double> fd_step = std::nullopt,
                           std::optional<std::size_t> truncation_l = std::nullopt, bool analytic_gradient = true);

// A nested sequence of candidates indexed by order 1..K.
struct ModelFamily {
    std::string name;
    FamilyTag tag;
    std::function<std::unique_ptr<ScoreModel>(std::size_t order)> build;
    /// Cold-start value for a candidate (reported scale).
    std::function<std::vector<double>(const Dataset&, std::size_t order)> initial;
    /// Maps a fitted order-k parameter vector into the order-(k+1) model
    /// with the new coordinate at zero.
    std::function<std::vector<double>(std::span<const double> params, std::size_t order)> embed;
    std::size_t max_order = 0;  // 0 = unbounded
};

ModelFamily ar_baker_family(const InitOptions& init = {}, const ShapeBounds& bounds = {});
ModelFamily poly_baker_family(const InitOptions& init = {}, const ShapeBounds& bounds = {});
/// Orders 1 and 2 are m1 (lambda = 0) and m2.
ModelFamily vonmises_family();

struct ScanConfig {
    std::size_t max_order = 1;
    std::vector<Criterion> criteria{Criterion::mic1, Criterion::mic2};
    FitOptions fit;
    bool warm_start = true;
    /// Slack before a decrease in GIC along the nesting is reported.
    double nesting_tolerance = 1e-6;
};

struct CandidateResult {
    std::size_t order = 0;
    std::size_t param_count = 0;
    bool excluded = false;
    std::optional<FitResult> fit;
    GicValue gic;
    std::map<Criterion, double> values;
    std::optional<BiasEstimate> bias;
    std::string note;
};

struct SelectionScan {
    std::string family;
    std::vector<CandidateResult> candidates;
    std::map<Criterion, std::size_t> selected;
    std::vector<std::string> warnings;
    std::size_t truncation_l = 0;

    std::size_t selected_order(Criterion c) const { return selected.at(c); }
};

/// Fits orders 1..K by MGICE and ranks them under each criterion. Time series
/// share the truncation L = K. Ties go to the smaller order.
SelectionScan scan_nested(const Dataset& data, const ModelFamily& family, const ScanConfig& cfg);

/// Picks the best order among non-excluded candidates for one criterion.
std::optional<std::size_t> select_order(std::span<const CandidateResult> candidates, Criterion c);

/// Gaussian-noise AR (conditional least squares on the window t > K) or
/// Gaussian-error polynomial regression, scored by AIC and BIC.
SelectionScan aic_bic_gaussian(const Dataset& data, std::size_t max_order);

}  // namespace micsel
