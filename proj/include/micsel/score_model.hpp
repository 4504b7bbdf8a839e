#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "micsel/constraints.hpp"
#include "micsel/dataset.hpp"

namespace micsel {

// A parametric family known through the gradient and Laplacian of its log
// density with respect to the data, never through its normalizing constant.
//
// Observation layout passed to every member:
//   unconditional  the d-vector itself
//   regression     (x, y); only y is differentiated
//   timeseries     x_{t-p}, ..., x_t; only x_t is differentiated
class ScoreModel {
public:
    virtual ~ScoreModel() = default;

    virtual std::string name() const = 0;
    virtual std::size_t param_dim() const = 0;
    /// Dimension of the differentiated variable.
    virtual std::size_t obs_dim() const = 0;
    virtual DataKind data_kind() const = 0;
    /// Number of lags a time-series observation carries.
    virtual std::size_t markov_order() const { return 0; }
    /// Offset of the differentiated coordinates inside an observation span.
    virtual std::size_t response_offset() const { return 0; }
    /// Length of an observation span.
    virtual std::size_t obs_length() const { return obs_dim(); }

    /// Writes grad_x log p into `grad` (length obs_dim) and returns the Laplacian.
    virtual double scores(std::span<const double> obs, std::span<const double> params,
                          std::span<double> grad) const = 0;

    /// Log of the unnormalized density. Used only by finite-difference oracles.
    virtual double log_unnorm(std::span<const double> obs, std::span<const double> params) const = 0;

    /// Families with closed-form d W / d params override both members below.
    virtual bool has_param_gradient() const { return false; }
    /// Returns W and writes dW/dparams (model scale) into `dw`.
    virtual double w_param_gradient(std::span<const double> obs, std::span<const double> params,
                                    std::span<double> dw) const;

    virtual ConstraintMap constraints() const = 0;
    /// Rewrites model-scale parameters into the equivalent representative
    /// that satisfies the family's reporting invariants.
    virtual void canonicalize(std::span<double> /*params*/) const {}
    virtual std::vector<std::string> param_names() const = 0;

    /// Number of independently adjusted parameters, #(M_k).
    virtual std::size_t free_parameter_count() const { return param_dim(); }

    std::vector<double> grad_log(std::span<const double> obs, std::span<const double> params) const;
    double laplacian_log(std::span<const double> obs, std::span<const double> params) const;
};

}  // namespace micsel
