#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "micsel/dataset.hpp"

namespace micsel {

struct CsvSchema {
    /// Columns to read, in order. Regression takes (x, y); time series one.
    std::vector<std::string> columns;
    DataKind kind = DataKind::unconditional;
};

/// Reads a header-first, comma-separated UTF-8 file with '.' decimals.
Dataset ingest_csv(const std::string& path, const CsvSchema& schema);

/// Parses CSV text already in memory; `source` names it in error messages.
Dataset parse_csv(std::string_view text, const CsvSchema& schema, std::string_view source = "<memory>");

/// Writes a header row and one row per observation. Values are printed in
/// shortest round-trip form, so re-ingesting reproduces them exactly.
void write_csv(const std::string& path, const Dataset& data, const std::vector<std::string>& column_names);
std::string format_csv(const Dataset& data, const std::vector<std::string>& column_names);

enum class TransformOp { log, log_return, standardize, bins_to_radians };

struct TransformSpec {
    TransformOp op = TransformOp::log;
    std::size_t bins = 16;               // bins_to_radians only
    std::optional<std::size_t> column;   // all columns when empty
};

/// Parses "log", "log_return", "standardize" or "bins_to_radians(B)".
TransformSpec parse_transform(std::string_view text);

Dataset transform(const Dataset& data, const TransformSpec& spec);

}  // namespace micsel
