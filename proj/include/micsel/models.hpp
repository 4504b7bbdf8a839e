#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "micsel/score_model.hpp"

namespace micsel {

struct BakerParams {
    double mu = 0.0;
    double s = 1.0;
    double alpha = 1.0;
    double k = 1.0;
};

struct ArBakerParams {
    std::vector<double> a;
    double c = 0.0;
    double s = 1.0;
    double alpha = 1.0;
    double k = 1.0;
};

struct PolyBakerParams {
    std::vector<double> beta;
    double c = 0.0;
    double s = 1.0;
    double alpha = 1.0;
    double k = 1.0;
};

struct VonMisesParams {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double lambda = 0.0;
    bool lambda_fixed_zero = false;
};

// Lower bounds on the Baker shape parameters used during estimation. The
// sample GIC is unbounded above as alpha -> 0 with s -> 0 (a t-like kernel
// collapsing onto one residual), so the search is kept on a compact set.
struct ShapeBounds {
    double alpha_min = 0.2;
    double k_min = 1.2;
};

struct UnivariateScore {
    double grad = 0.0;
    double laplacian = 0.0;
};

struct BivariateScore {
    std::array<double, 2> grad{};
    double laplacian_sum = 0.0;
};

void validate(const BakerParams& p);
void validate(const ArBakerParams& p);
void validate(const PolyBakerParams& p);
void validate(const VonMisesParams& p);

/// Scores of (1/s) f((y - mu)/s) with f(x) proportional to exp(-alpha x^2/2) / (1 + x^2)^k.
UnivariateScore baker_score(double y, const BakerParams& p);

/// `window` holds x_{t-p}, ..., x_t; differentiation is in x_t.
UnivariateScore ar_baker_score(std::span<const double> window, const ArBakerParams& p);

/// Differentiation is in y; x is a fixed covariate.
UnivariateScore poly_baker_score(double x, double y, const PolyBakerParams& p);

/// Angles need not be wrapped.
BivariateScore vonmises_score(double x1, double x2, const VonMisesParams& p);

UnivariateScore gaussian_location_score(double x, double theta, double sigma);

// ---------------------------------------------------------------------------
// ScoreModel implementations. Parameter vectors are laid out as
//   Baker            (mu, s, alpha, k)
//   AR(p)-Baker      (a_1..a_p, c, s, alpha, k)
//   poly(p)-Baker    (beta_1..beta_p, c, s, alpha, k)
//   von Mises m1     (kappa1, kappa2, mu1, mu2)
//   von Mises m2     (kappa1, kappa2, mu1, mu2, lambda)
//   Gaussian loc.    (theta)
//   AR(p)-Gaussian   (a_1..a_p, c, s)

BakerParams unpack_baker(std::span<const double> theta);
ArBakerParams unpack_ar_baker(std::span<const double> theta);
PolyBakerParams unpack_poly_baker(std::span<const double> theta);
VonMisesParams unpack_vonmises(std::span<const double> theta);

std::vector<double> pack(const BakerParams& p);
std::vector<double> pack(const ArBakerParams& p);
std::vector<double> pack(const PolyBakerParams& p);
std::vector<double> pack(const VonMisesParams& p);

class BakerModel final : public ScoreModel {
public:
    explicit BakerModel(ShapeBounds bounds = {}) : bounds_(bounds) {}

    std::string name() const override { return "baker"; }
    std::size_t param_dim() const override { return 4; }
    std::size_t obs_dim() const override { return 1; }
    DataKind data_kind() const override { return DataKind::unconditional; }
    double scores(std::span<const double> obs, std::span<const double> params, std::span<double> grad) const override;
    double log_unnorm(std::span<const double> obs, std::span<const double> params) const override;
    bool has_param_gradient() const override { return true; }
    double w_param_gradient(std::span<const double> obs, std::span<const double> params,
                            std::span<double> dw) const override;
    ConstraintMap constraints() const override;
    std::vector<std::string> param_names() const override;

private:
    ShapeBounds bounds_;
};

class ArBakerModel final : public ScoreModel {
public:
    explicit ArBakerModel(std::size_t order, ShapeBounds bounds = {});

    std::size_t order() const noexcept { return order_; }
    std::string name() const override;
    std::size_t param_dim() const override { return order_ + 4; }
    std::size_t obs_dim() const override { return 1; }
    DataKind data_kind() const override { return DataKind::timeseries; }
    std::size_t markov_order() const override { return order_; }
    std::size_t response_offset() const override { return order_; }
    std::size_t obs_length() const override { return order_ + 1; }
    double scores(std::span<const double> obs, std::span<const double> params, std::span<double> grad) const override;
    double log_unnorm(std::span<const double> obs, std::span<const double> params) const override;
    bool has_param_gradient() const override { return true; }
    double w_param_gradient(std::span<const double> obs, std::span<const double> params,
                            std::span<double> dw) const override;
    ConstraintMap constraints() const override;
    std::vector<std::string> param_names() const override;

private:
    std::size_t order_;
    ShapeBounds bounds_;
};

class PolyBakerModel final : public ScoreModel {
public:
    explicit PolyBakerModel(std::size_t degree, ShapeBounds bounds = {});

    std::size_t degree() const noexcept { return degree_; }
    std::string name() const override;
    std::size_t param_dim() const override { return degree_ + 4; }
    std::size_t obs_dim() const override { return 1; }
    DataKind data_kind() const override { return DataKind::regression; }
    std::size_t response_offset() const override { return 1; }
    std::size_t obs_length() const override { return 2; }
    double scores(std::span<const double> obs, std::span<const double> params, std::span<double> grad) const override;
    double log_unnorm(std::span<const double> obs, std::span<const double> params) const override;
    bool has_param_gradient() const override { return true; }
    double w_param_gradient(std::span<const double> obs, std::span<const double> params,
                            std::span<double> dw) const override;
    ConstraintMap constraints() const override;
    std::vector<std::string> param_names() const override;

private:
    std::size_t degree_;
    ShapeBounds bounds_;
};

/// Bivariate von Mises on the torus; `with_dependence` selects m2 over m1.
/// Concentrations are optimized on the real line: a negative kappa_i is the
/// same density as (-kappa_i, mu_i + pi, -lambda), which canonicalize applies.
class VonMisesModel final : public ScoreModel {
public:
    explicit VonMisesModel(bool with_dependence);

    bool with_dependence() const noexcept { return dependent_; }
    std::string name() const override { return dependent_ ? "vonmises-m2" : "vonmises-m1"; }
    std::size_t param_dim() const override { return dependent_ ? 5 : 4; }
    std::size_t obs_dim() const override { return 2; }
    DataKind data_kind() const override { return DataKind::unconditional; }
    double scores(std::span<const double> obs, std::span<const double> params, std::span<double> grad) const override;
    double log_unnorm(std::span<const double> obs, std::span<const double> params) const override;
    bool has_param_gradient() const override { return true; }
    double w_param_gradient(std::span<const double> obs, std::span<const double> params,
                            std::span<double> dw) const override;
    ConstraintMap constraints() const override;
    void canonicalize(std::span<double> params) const override;
    std::vector<std::string> param_names() const override;

private:
    bool dependent_;
};

/// N(theta, sigma^2) with known sigma; the estimation and bias oracle.
class GaussianLocationModel final : public ScoreModel {
public:
    explicit GaussianLocationModel(double sigma = 1.0, Transform theta_transform = Transform::identity);

    std::string name() const override { return "gaussian-location"; }
    std::size_t param_dim() const override { return 1; }
    std::size_t obs_dim() const override { return 1; }
    DataKind data_kind() const override { return DataKind::unconditional; }
    double scores(std::span<const double> obs, std::span<const double> params, std::span<double> grad) const override;
    double log_unnorm(std::span<const double> obs, std::span<const double> params) const override;
    bool has_param_gradient() const override { return true; }
    double w_param_gradient(std::span<const double> obs, std::span<const double> params,
                            std::span<double> dw) const override;
    ConstraintMap constraints() const override { return ConstraintMap({transform_}); }
    std::vector<std::string> param_names() const override { return {"theta"}; }

private:
    double sigma_;
    Transform transform_;
};

/// AR(p) with Gaussian innovations. Has no analytic parameter gradient, so
/// fits against it exercise the finite-difference path.
class ArGaussianModel final : public ScoreModel {
public:
    explicit ArGaussianModel(std::size_t order);

    std::string name() const override;
    std::size_t param_dim() const override { return order_ + 2; }
    std::size_t obs_dim() const override { return 1; }
    DataKind data_kind() const override { return DataKind::timeseries; }
    std::size_t markov_order() const override { return order_; }
    std::size_t response_offset() const override { return order_; }
    std::size_t obs_length() const override { return order_ + 1; }
    double scores(std::span<const double> obs, std::span<const double> params, std::span<double> grad) const override;
    double log_unnorm(std::span<const double> obs, std::span<const double> params) const override;
    ConstraintMap constraints() const override;
    std::vector<std::string> param_names() const override;

private:
    std::size_t order_;
    ShapeBounds bounds_;
};

}  // namespace micsel
