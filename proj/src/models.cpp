#include "micsel/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "micsel/errors.hpp"

namespace micsel {

namespace {

// Location tags followed by the (s, alpha, k) block.
ConstraintMap shape_constraints(std::vector<Transform> tags, const ShapeBounds& b) {
    if (!(b.alpha_min >= 0.0) || !(b.k_min >= 0.0)) throw ContractError("shape bounds must be non-negative");
    std::vector<double> lower(tags.size(), 0.0);
    tags.insert(tags.end(), 3, Transform::log_positive);
    lower.insert(lower.end(), {0.0, b.alpha_min, b.k_min});
    return ConstraintMap(std::move(tags), std::move(lower));
}


// Score kernel of the standardized Baker density at residual u.
//   phi(u) = alpha u + 2k u / (1 + u^2)        grad = -phi / s
//   psi(u) = alpha + 2k (1 - u^2) / (1 + u^2)^2  lap = -psi / s^2
// and psi = phi'.
struct BakerKernel {
    double phi;
    double psi;
    double w;  // (2 psi - phi^2) / s^2
};

inline BakerKernel baker_kernel(double u, double s, double alpha, double k) {
    const double q = 1.0 + u * u;
    const double phi = alpha * u + 2.0 * k * u / q;
    const double psi = alpha + 2.0 * k * (1.0 - u * u) / (q * q);
    return {phi, psi, (2.0 * psi - phi * phi) / (s * s)};
}

// Derivatives of W with respect to u, alpha, k and s at fixed residual.
struct BakerWGradient {
    double w;
    double du;
    double dalpha;
    double dk;
    double ds_fixed_u;
};

inline BakerWGradient baker_w_gradient(double u, double s, double alpha, double k) {
    const double q = 1.0 + u * u;
    const BakerKernel ker = baker_kernel(u, s, alpha, k);
    const double s2 = s * s;
    const double dpsi_du = 4.0 * k * u * (u * u - 3.0) / (q * q * q);
    BakerWGradient g;
    g.w = ker.w;
    g.du = (2.0 * dpsi_du - 2.0 * ker.phi * ker.psi) / s2;
    g.dalpha = (2.0 - 2.0 * ker.phi * u) / s2;
    g.dk = (4.0 * (1.0 - u * u) / (q * q) - 4.0 * ker.phi * u / q) / s2;
    g.ds_fixed_u = -2.0 * ker.w / s;
    return g;
}

inline double baker_log_kernel(double u, double s, double alpha, double k) {
    return -0.5 * alpha * u * u - k * std::log1p(u * u) - std::log(s);
}

inline UnivariateScore baker_from_residual(double r, double s, double alpha, double k) {
    const double u = r / s;
    const BakerKernel ker = baker_kernel(u, s, alpha, k);
    return {-ker.phi / s, -ker.psi / (s * s)};
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ContractError(std::string(what) + " must be positive and finite");
}

// Residual y_t - mu_t of the mean-centred AR recursion.
inline double ar_residual(std::span<const double> window, std::span<const double> a, double c) {
    const std::size_t p = a.size();
    double mu = 0.0;
    for (std::size_t j = 1; j <= p; ++j) mu += a[j - 1] * (window[p - j] - c);
    return (window[p] - c) - mu;
}

inline double poly_mean(double x, std::span<const double> beta, double c) {
    double m = 0.0;
    for (std::size_t j = beta.size(); j-- > 0;) m = (m + beta[j]) * x;
    return m + c;
}

// Fills dW/dtheta for a Baker-noise model whose residual r depends on the
// location parameters through dr/dtheta_j = dr[j] (j < n_loc); the last three
// coordinates are (s, alpha, k).
double baker_location_model_gradient(double r, double s, double alpha, double k, std::span<const double> dr,
                                     std::span<double> dw) {
    const double u = r / s;
    const BakerWGradient g = baker_w_gradient(u, s, alpha, k);
    const std::size_t n_loc = dr.size();
    for (std::size_t j = 0; j < n_loc; ++j) dw[j] = g.du * dr[j] / s;
    dw[n_loc] = g.ds_fixed_u - g.du * u / s;
    dw[n_loc + 1] = g.dalpha;
    dw[n_loc + 2] = g.dk;
    return g.w;
}

}  // namespace

void validate(const BakerParams& p) {
    require_positive(p.s, "s");
    require_positive(p.alpha, "alpha");
    require_positive(p.k, "k");
}

void validate(const ArBakerParams& p) {
    if (p.a.empty()) throw ContractError("AR order must be at least 1");
    validate(BakerParams{p.c, p.s, p.alpha, p.k});
}

void validate(const PolyBakerParams& p) {
    if (p.beta.empty()) throw ContractError("polynomial degree must be at least 1");
    validate(BakerParams{p.c, p.s, p.alpha, p.k});
}

void validate(const VonMisesParams& p) {
    if (p.kappa1 < 0.0 || p.kappa2 < 0.0) throw ContractError("von Mises concentrations must be non-negative");
    if (p.lambda_fixed_zero && p.lambda != 0.0) throw ContractError("lambda must be 0 when fixed to zero");
}

UnivariateScore baker_score(double y, const BakerParams& p) {
    validate(p);
    return baker_from_residual(y - p.mu, p.s, p.alpha, p.k);
}

UnivariateScore ar_baker_score(std::span<const double> window, const ArBakerParams& p) {
    validate(p);
    if (window.size() != p.a.size() + 1) {
        throw ContractError("AR window must hold exactly " + std::to_string(p.a.size()) + " lags plus x_t");
    }
    return baker_from_residual(ar_residual(window, p.a, p.c), p.s, p.alpha, p.k);
}

UnivariateScore poly_baker_score(double x, double y, const PolyBakerParams& p) {
    validate(p);
    return baker_from_residual(y - poly_mean(x, p.beta, p.c), p.s, p.alpha, p.k);
}

BivariateScore vonmises_score(double x1, double x2, const VonMisesParams& p) {
    const double s1 = std::sin(x1 - p.mu1), c1 = std::cos(x1 - p.mu1);
    const double s2 = std::sin(x2 - p.mu2), c2 = std::cos(x2 - p.mu2);
    BivariateScore out;
    out.grad[0] = -p.kappa1 * s1 + p.lambda * c1 * s2;
    out.grad[1] = -p.kappa2 * s2 + p.lambda * s1 * c2;
    out.laplacian_sum = -p.kappa1 * c1 - p.kappa2 * c2 - 2.0 * p.lambda * s1 * s2;
    return out;
}

UnivariateScore gaussian_location_score(double x, double theta, double sigma) {
    require_positive(sigma, "sigma");
    const double v = sigma * sigma;
    return {-(x - theta) / v, -1.0 / v};
}

// --- packing ---------------------------------------------------------------

BakerParams unpack_baker(std::span<const double> t) {
    if (t.size() != 4) throw ContractError("Baker parameter vector has length 4");
    return {t[0], t[1], t[2], t[3]};
}

ArBakerParams unpack_ar_baker(std::span<const double> t) {
    if (t.size() < 5) throw ContractError("AR-Baker parameter vector needs at least 5 entries");
    const std::size_t p = t.size() - 4;
    return {std::vector<double>(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(p)), t[p], t[p + 1], t[p + 2],
            t[p + 3]};
}

PolyBakerParams unpack_poly_baker(std::span<const double> t) {
    if (t.size() < 5) throw ContractError("poly-Baker parameter vector needs at least 5 entries");
    const std::size_t p = t.size() - 4;
    return {std::vector<double>(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(p)), t[p], t[p + 1], t[p + 2],
            t[p + 3]};
}

VonMisesParams unpack_vonmises(std::span<const double> t) {
    if (t.size() == 4) return {t[0], t[1], t[2], t[3], 0.0, true};
    if (t.size() == 5) return {t[0], t[1], t[2], t[3], t[4], false};
    throw ContractError("von Mises parameter vector has length 4 or 5");
}

std::vector<double> pack(const BakerParams& p) { return {p.mu, p.s, p.alpha, p.k}; }

std::vector<double> pack(const ArBakerParams& p) {
    std::vector<double> t(p.a);
    t.insert(t.end(), {p.c, p.s, p.alpha, p.k});
    return t;
}

std::vector<double> pack(const PolyBakerParams& p) {
    std::vector<double> t(p.beta);
    t.insert(t.end(), {p.c, p.s, p.alpha, p.k});
    return t;
}

std::vector<double> pack(const VonMisesParams& p) {
    std::vector<double> t{p.kappa1, p.kappa2, p.mu1, p.mu2};
    if (!p.lambda_fixed_zero) t.push_back(p.lambda);
    return t;
}

// --- Baker -----------------------------------------------------------------

double BakerModel::scores(std::span<const double> obs, std::span<const double> t, std::span<double> grad) const {
    const UnivariateScore sc = baker_from_residual(obs[0] - t[0], t[1], t[2], t[3]);
    grad[0] = sc.grad;
    return sc.laplacian;
}

double BakerModel::log_unnorm(std::span<const double> obs, std::span<const double> t) const {
    return baker_log_kernel((obs[0] - t[0]) / t[1], t[1], t[2], t[3]);
}

double BakerModel::w_param_gradient(std::span<const double> obs, std::span<const double> t,
                                    std::span<double> dw) const {
    const double dr[1] = {-1.0};
    return baker_location_model_gradient(obs[0] - t[0], t[1], t[2], t[3], dr, dw);
}

ConstraintMap BakerModel::constraints() const {
    return shape_constraints({Transform::identity}, bounds_);
}

std::vector<std::string> BakerModel::param_names() const { return {"mu", "s", "alpha", "k"}; }

// --- AR-Baker --------------------------------------------------------------

ArBakerModel::ArBakerModel(std::size_t order, ShapeBounds bounds) : order_(order), bounds_(bounds) {
    if (order == 0) throw ContractError("AR order must be at least 1");
}

std::string ArBakerModel::name() const { return "ar-baker(" + std::to_string(order_) + ")"; }

double ArBakerModel::scores(std::span<const double> obs, std::span<const double> t, std::span<double> grad) const {
    const std::size_t p = order_;
    const UnivariateScore sc = baker_from_residual(ar_residual(obs, t.first(p), t[p]), t[p + 1], t[p + 2], t[p + 3]);
    grad[0] = sc.grad;
    return sc.laplacian;
}

double ArBakerModel::log_unnorm(std::span<const double> obs, std::span<const double> t) const {
    const std::size_t p = order_;
    const double r = ar_residual(obs, t.first(p), t[p]);
    return baker_log_kernel(r / t[p + 1], t[p + 1], t[p + 2], t[p + 3]);
}

double ArBakerModel::w_param_gradient(std::span<const double> obs, std::span<const double> t,
                                      std::span<double> dw) const {
    const std::size_t p = order_;
    const double c = t[p];
    double dr[64];
    std::vector<double> dr_heap;
    double* drp = dr;
    if (p + 1 > 64) {
        dr_heap.resize(p + 1);
        drp = dr_heap.data();
    }
    double sum_a = 0.0;
    for (std::size_t j = 1; j <= p; ++j) {
        drp[j - 1] = -(obs[p - j] - c);
        sum_a += t[j - 1];
    }
    drp[p] = sum_a - 1.0;
    return baker_location_model_gradient(ar_residual(obs, t.first(p), c), t[p + 1], t[p + 2], t[p + 3],
                                         std::span<const double>(drp, p + 1), dw);
}

ConstraintMap ArBakerModel::constraints() const {
    return shape_constraints(std::vector<Transform>(order_ + 1, Transform::identity), bounds_);
}

std::vector<std::string> ArBakerModel::param_names() const {
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= order_; ++j) names.push_back("a" + std::to_string(j));
    names.insert(names.end(), {"c", "s", "alpha", "k"});
    return names;
}

// --- polynomial-Baker ------------------------------------------------------

PolyBakerModel::PolyBakerModel(std::size_t degree, ShapeBounds bounds) : degree_(degree), bounds_(bounds) {
    if (degree == 0) throw ContractError("polynomial degree must be at least 1");
}

std::string PolyBakerModel::name() const { return "poly-baker(" + std::to_string(degree_) + ")"; }

double PolyBakerModel::scores(std::span<const double> obs, std::span<const double> t, std::span<double> grad) const {
    const std::size_t p = degree_;
    const double r = obs[1] - poly_mean(obs[0], t.first(p), t[p]);
    const UnivariateScore sc = baker_from_residual(r, t[p + 1], t[p + 2], t[p + 3]);
    grad[0] = sc.grad;
    return sc.laplacian;
}

double PolyBakerModel::log_unnorm(std::span<const double> obs, std::span<const double> t) const {
    const std::size_t p = degree_;
    const double r = obs[1] - poly_mean(obs[0], t.first(p), t[p]);
    return baker_log_kernel(r / t[p + 1], t[p + 1], t[p + 2], t[p + 3]);
}

double PolyBakerModel::w_param_gradient(std::span<const double> obs, std::span<const double> t,
                                        std::span<double> dw) const {
    const std::size_t p = degree_;
    double dr[64];
    std::vector<double> dr_heap;
    double* drp = dr;
    if (p + 1 > 64) {
        dr_heap.resize(p + 1);
        drp = dr_heap.data();
    }
    double xp = 1.0;
    for (std::size_t j = 0; j < p; ++j) {
        xp *= obs[0];
        drp[j] = -xp;
    }
    drp[p] = -1.0;
    const double r = obs[1] - poly_mean(obs[0], t.first(p), t[p]);
    return baker_location_model_gradient(r, t[p + 1], t[p + 2], t[p + 3], std::span<const double>(drp, p + 1), dw);
}

ConstraintMap PolyBakerModel::constraints() const {
    return shape_constraints(std::vector<Transform>(degree_ + 1, Transform::identity), bounds_);
}

std::vector<std::string> PolyBakerModel::param_names() const {
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= degree_; ++j) names.push_back("beta" + std::to_string(j));
    names.insert(names.end(), {"c", "s", "alpha", "k"});
    return names;
}

// --- von Mises -------------------------------------------------------------

VonMisesModel::VonMisesModel(bool with_dependence) : dependent_(with_dependence) {}

double VonMisesModel::scores(std::span<const double> obs, std::span<const double> t, std::span<double> grad) const {
    const BivariateScore sc = vonmises_score(obs[0], obs[1], unpack_vonmises(t));
    grad[0] = sc.grad[0];
    grad[1] = sc.grad[1];
    return sc.laplacian_sum;
}

double VonMisesModel::log_unnorm(std::span<const double> obs, std::span<const double> t) const {
    const VonMisesParams p = unpack_vonmises(t);
    const double d1 = obs[0] - p.mu1, d2 = obs[1] - p.mu2;
    return p.kappa1 * std::cos(d1) + p.kappa2 * std::cos(d2) + p.lambda * std::sin(d1) * std::sin(d2);
}

double VonMisesModel::w_param_gradient(std::span<const double> obs, std::span<const double> t,
                                       std::span<double> dw) const {
    const double k1 = t[0], k2 = t[1];
    const double lam = dependent_ ? t[4] : 0.0;
    const double s1 = std::sin(obs[0] - t[2]), c1 = std::cos(obs[0] - t[2]);
    const double s2 = std::sin(obs[1] - t[3]), c2 = std::cos(obs[1] - t[3]);
    const double g1 = -k1 * s1 + lam * c1 * s2;
    const double g2 = -k2 * s2 + lam * s1 * c2;
    // W = -g1^2 - g2^2 + 2 k1 c1 + 2 k2 c2 + 4 lam s1 s2
    const double w = -g1 * g1 - g2 * g2 + 2.0 * k1 * c1 + 2.0 * k2 * c2 + 4.0 * lam * s1 * s2;
    dw[0] = 2.0 * g1 * s1 + 2.0 * c1;
    dw[1] = 2.0 * g2 * s2 + 2.0 * c2;
    // d/dmu_j = -d/dd_j with d_j = x_j - mu_j
    const double dg1_dd1 = -k1 * c1 - lam * s1 * s2;
    const double dg2_dd1 = lam * c1 * c2;
    const double dg1_dd2 = lam * c1 * c2;
    const double dg2_dd2 = -k2 * c2 - lam * s1 * s2;
    const double dw_dd1 = -2.0 * g1 * dg1_dd1 - 2.0 * g2 * dg2_dd1 - 2.0 * k1 * s1 + 4.0 * lam * c1 * s2;
    const double dw_dd2 = -2.0 * g1 * dg1_dd2 - 2.0 * g2 * dg2_dd2 - 2.0 * k2 * s2 + 4.0 * lam * s1 * c2;
    dw[2] = -dw_dd1;
    dw[3] = -dw_dd2;
    if (dependent_) dw[4] = -2.0 * g1 * c1 * s2 - 2.0 * g2 * s1 * c2 + 4.0 * s1 * s2;
    return w;
}

ConstraintMap VonMisesModel::constraints() const {
    std::vector<Transform> tags{Transform::identity, Transform::identity, Transform::angle, Transform::angle};
    if (dependent_) tags.push_back(Transform::identity);
    return ConstraintMap(std::move(tags));
}

void VonMisesModel::canonicalize(std::span<double> params) const {
    for (std::size_t i = 0; i < 2; ++i) {
        if (params[i] < 0.0) {
            params[i] = -params[i];
            params[i + 2] += std::numbers::pi;
            if (dependent_) params[4] = -params[4];
        }
    }
}

std::vector<std::string> VonMisesModel::param_names() const {
    std::vector<std::string> names{"kappa1", "kappa2", "mu1", "mu2"};
    if (dependent_) names.push_back("lambda");
    return names;
}

// --- Gaussian oracles ------------------------------------------------------

GaussianLocationModel::GaussianLocationModel(double sigma, Transform theta_transform)
    : sigma_(sigma), transform_(theta_transform) {
    require_positive(sigma, "sigma");
    if (theta_transform == Transform::angle) throw ContractError("location cannot be an angle");
}

double GaussianLocationModel::scores(std::span<const double> obs, std::span<const double> t,
                                     std::span<double> grad) const {
    const double v = sigma_ * sigma_;
    grad[0] = -(obs[0] - t[0]) / v;
    return -1.0 / v;
}

double GaussianLocationModel::log_unnorm(std::span<const double> obs, std::span<const double> t) const {
    const double z = (obs[0] - t[0]) / sigma_;
    return -0.5 * z * z;
}

double GaussianLocationModel::w_param_gradient(std::span<const double> obs, std::span<const double> t,
                                               std::span<double> dw) const {
    const double v = sigma_ * sigma_;
    const double r = obs[0] - t[0];
    dw[0] = 2.0 * r / (v * v);
    return -r * r / (v * v) + 2.0 / v;
}

ArGaussianModel::ArGaussianModel(std::size_t order) : order_(order) {
    if (order == 0) throw ContractError("AR order must be at least 1");
}

std::string ArGaussianModel::name() const { return "ar-gaussian(" + std::to_string(order_) + ")"; }

double ArGaussianModel::scores(std::span<const double> obs, std::span<const double> t, std::span<double> grad) const {
    const std::size_t p = order_;
    const double v = t[p + 1] * t[p + 1];
    grad[0] = -ar_residual(obs, t.first(p), t[p]) / v;
    return -1.0 / v;
}

double ArGaussianModel::log_unnorm(std::span<const double> obs, std::span<const double> t) const {
    const std::size_t p = order_;
    const double z = ar_residual(obs, t.first(p), t[p]) / t[p + 1];
    return -0.5 * z * z;
}

ConstraintMap ArGaussianModel::constraints() const {
    std::vector<Transform> tags(order_ + 1, Transform::identity);
    tags.push_back(Transform::log_positive);
    return ConstraintMap(std::move(tags));
}

std::vector<std::string> ArGaussianModel::param_names() const {
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= order_; ++j) names.push_back("a" + std::to_string(j));
    names.insert(names.end(), {"c", "s"});
    return names;
}

}  // namespace micsel
