#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace micsel {

// How a parameter coordinate is represented during optimization.
//   identity      optimize the value itself
//   log_positive  optimize log(value - lower), report lower + exp
//   angle         optimize unconstrained, report modulo 2*pi
enum class Transform { identity, log_positive, angle };

std::string_view to_string(Transform t);

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double radians);

class ConstraintMap {
public:
    ConstraintMap() = default;
    explicit ConstraintMap(std::vector<Transform> tags) : tags_(std::move(tags)), lower_(tags_.size(), 0.0) {}
    /// `lower` holds the open lower bound of each log_positive coordinate.
    ConstraintMap(std::vector<Transform> tags, std::vector<double> lower);

    std::size_t size() const noexcept { return tags_.size(); }
    Transform tag(std::size_t i) const { return tags_.at(i); }
    const std::vector<Transform>& tags() const noexcept { return tags_; }
    double lower(std::size_t i) const { return lower_.at(i); }

    std::vector<double> to_internal(std::span<const double> reported) const;
    // Parameters handed to score functions; angles stay unwrapped.
    std::vector<double> to_model(std::span<const double> internal) const;
    void to_model(std::span<const double> internal, std::span<double> out) const;
    std::vector<double> to_reported(std::span<const double> internal) const;
    /// Maps model-space values to reported values (wraps angles only).
    std::vector<double> report(std::span<const double> model) const;
    /// Lifts log_positive values sitting on their bound just inside it, so a
    /// boundary fit can seed another fit.
    std::vector<double> nudge_inside(std::span<const double> reported, double margin = 1e-6) const;
    /// d(model_i)/d(internal_i).
    double jacobian(std::size_t i, double internal) const;

private:
    std::vector<Transform> tags_;
    std::vector<double> lower_;
};

}  // namespace micsel
