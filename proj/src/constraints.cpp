#include "micsel/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "micsel/errors.hpp"

namespace micsel {

std::string_view to_string(Transform t) {
    switch (t) {
        case Transform::identity: return "identity";
        case Transform::log_positive: return "log_positive";
        case Transform::angle: return "angle";
    }
    return "unknown";
}

double wrap_angle(double radians) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(radians, two_pi);
    if (r < 0.0) r += two_pi;
    // fmod of a tiny negative value can round up to exactly 2*pi
    if (r >= two_pi) r = 0.0;
    return r;
}

ConstraintMap::ConstraintMap(std::vector<Transform> tags, std::vector<double> lower)
    : tags_(std::move(tags)), lower_(std::move(lower)) {
    if (lower_.size() != tags_.size()) throw ContractError("one lower bound per coordinate is required");
}

std::vector<double> ConstraintMap::to_internal(std::span<const double> reported) const {
    if (reported.size() != tags_.size()) throw ContractError("parameter length does not match constraint map");
    std::vector<double> out(reported.begin(), reported.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (tags_[i] == Transform::log_positive) {
            if (!(out[i] > lower_[i])) {
                throw ContractError("coordinate " + std::to_string(i) + " must exceed " + std::to_string(lower_[i]));
            }
            out[i] = std::log(out[i] - lower_[i]);
        }
    }
    return out;
}

std::vector<double> ConstraintMap::nudge_inside(std::span<const double> reported, double margin) const {
    if (reported.size() != tags_.size()) throw ContractError("parameter length does not match constraint map");
    std::vector<double> out(reported.begin(), reported.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (tags_[i] != Transform::log_positive) continue;
        const double floor = lower_[i] + margin * std::max(1.0, std::abs(lower_[i]));
        if (out[i] < floor) out[i] = floor;
    }
    return out;
}

void ConstraintMap::to_model(std::span<const double> internal, std::span<double> out) const {
    for (std::size_t i = 0; i < tags_.size(); ++i) {
        out[i] = tags_[i] == Transform::log_positive ? lower_[i] + std::exp(internal[i]) : internal[i];
    }
}

std::vector<double> ConstraintMap::to_model(std::span<const double> internal) const {
    if (internal.size() != tags_.size()) throw ContractError("parameter length does not match constraint map");
    std::vector<double> out(internal.size());
    to_model(internal, out);
    return out;
}

std::vector<double> ConstraintMap::report(std::span<const double> model) const {
    if (model.size() != tags_.size()) throw ContractError("parameter length does not match constraint map");
    std::vector<double> out(model.begin(), model.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (tags_[i] == Transform::angle) out[i] = wrap_angle(out[i]);
    }
    return out;
}

std::vector<double> ConstraintMap::to_reported(std::span<const double> internal) const {
    return report(to_model(internal));
}

double ConstraintMap::jacobian(std::size_t i, double internal) const {
    return tags_[i] == Transform::log_positive ? std::exp(internal) : 1.0;
}

}  // namespace micsel
