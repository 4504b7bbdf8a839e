#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "micsel/score_model.hpp"

namespace micsel::testing {

// Delegates everything but adds a constant to log_unnorm.
class ShiftedModel final : public ScoreModel {
public:
    ShiftedModel(const ScoreModel& base, double shift) : base_(base), shift_(shift) {}

    std::string name() const override { return base_.name() + "+c"; }
    std::size_t param_dim() const override { return base_.param_dim(); }
    std::size_t obs_dim() const override { return base_.obs_dim(); }
    DataKind data_kind() const override { return base_.data_kind(); }
    std::size_t markov_order() const override { return base_.markov_order(); }
    std::size_t response_offset() const override { return base_.response_offset(); }
    std::size_t obs_length() const override { return base_.obs_length(); }
    double scores(std::span<const double> obs, std::span<const double> params, std::span<double> grad) const override {
        return base_.scores(obs, params, grad);
    }
    double log_unnorm(std::span<const double> obs, std::span<const double> params) const override {
        return base_.log_unnorm(obs, params) + shift_;
    }
    ConstraintMap constraints() const override { return base_.constraints(); }
    std::vector<std::string> param_names() const override { return base_.param_names(); }

private:
    const ScoreModel& base_;
    double shift_;
};

inline double sample_mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_sd(std::span<const double> v) {
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace micsel::testing
