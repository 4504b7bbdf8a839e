#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace micsel {

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

/// Violated precondition of a public operation (wrong lengths, bad flags).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite score or Laplacian produced while evaluating W.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, std::size_t index)
        : std::runtime_error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class InvalidWindowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InitializationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OptimizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StationarityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BiasError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ScanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MomentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data ingestion and transform failures; `row` is 1-based when known.
class DataError : public std::runtime_error {
public:
    DataError(const std::string& what, std::size_t row = kNoIndex)
        : std::runtime_error(what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

}  // namespace micsel
