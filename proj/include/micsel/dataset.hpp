#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace micsel {

enum class DataKind { unconditional, regression, timeseries };

std::string_view to_string(DataKind kind);

// Row-major observation store. Regression rows are (x, y); time series rows
// are single scalars kept in order so that lag windows are contiguous.
class Dataset {
public:
    static Dataset unconditional(std::size_t dim, std::vector<double> flat);
    static Dataset regression(std::span<const double> x, std::span<const double> y);
    static Dataset timeseries(std::vector<double> series);

    DataKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return values_.size() / width_; }
    std::size_t width() const noexcept { return width_; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * width_, width_};
    }

    // x_{t-lags}, ..., x_t for a time series.
    std::span<const double> window(std::size_t t, std::size_t lags) const;

    std::span<const double> values() const noexcept { return values_; }
    std::vector<double> column(std::size_t j) const;

    // Free-form numeric annotations such as sampler acceptance rates.
    std::map<std::string, double>& metadata() noexcept { return metadata_; }
    const std::map<std::string, double>& metadata() const noexcept { return metadata_; }

    bool operator==(const Dataset& other) const {
        return kind_ == other.kind_ && width_ == other.width_ && values_ == other.values_;
    }

private:
    Dataset(DataKind kind, std::size_t width, std::vector<double> values);

    DataKind kind_;
    std::size_t width_;
    std::vector<double> values_;
    std::map<std::string, double> metadata_;
};

}  // namespace micsel
