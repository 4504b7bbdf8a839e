#include "micsel/dataset.hpp"

#include "micsel/errors.hpp"

namespace micsel {

std::string_view to_string(DataKind kind) {
    switch (kind) {
        case DataKind::unconditional: return "unconditional";
        case DataKind::regression: return "regression";
        case DataKind::timeseries: return "timeseries";
    }
    return "unknown";
}

Dataset::Dataset(DataKind kind, std::size_t width, std::vector<double> values)
    : kind_(kind), width_(width), values_(std::move(values)) {
    if (width_ == 0) throw ContractError("dataset width must be positive");
    if (values_.empty()) throw ContractError("dataset must hold at least one observation");
    if (values_.size() % width_ != 0) {
        throw ContractError("dataset values are not a whole number of rows");
    }
}

Dataset Dataset::unconditional(std::size_t dim, std::vector<double> flat) {
    return Dataset(DataKind::unconditional, dim, std::move(flat));
}

Dataset Dataset::regression(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractError("regression x and y lengths differ");
    std::vector<double> flat;
    flat.reserve(2 * x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        flat.push_back(x[i]);
        flat.push_back(y[i]);
    }
    return Dataset(DataKind::regression, 2, std::move(flat));
}

Dataset Dataset::timeseries(std::vector<double> series) {
    return Dataset(DataKind::timeseries, 1, std::move(series));
}

std::span<const double> Dataset::window(std::size_t t, std::size_t lags) const {
    if (kind_ != DataKind::timeseries) throw ContractError("lag windows need a time series");
    if (t < lags || t >= values_.size()) throw ContractError("lag window out of range");
    return {values_.data() + (t - lags), lags + 1};
}

std::vector<double> Dataset::column(std::size_t j) const {
    if (j >= width_) throw ContractError("column index out of range");
    std::vector<double> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(values_[i * width_ + j]);
    return out;
}

}  // namespace micsel
