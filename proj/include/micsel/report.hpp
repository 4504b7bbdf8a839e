#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "micsel/experiments.hpp"

namespace micsel::report {

inline constexpr int kSchemaVersion = 1;

OptimizerKind parse_optimizer(std::string_view s);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Inverse of to_json; missing keys keep the scenario defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentReport& r);
nlohmann::json to_json(const FitResult& fit, const std::vector<std::string>& names);
nlohmann::json to_json(const SelectionScan& scan, const std::vector<std::string>& names_at_k);
nlohmann::json to_json(std::span<const RuntimeRow> rows);
nlohmann::json to_json(std::span<const ForecastRow> rows);
nlohmann::json to_json(const MomentSummary& m);
nlohmann::json to_json(const RateDiagnostic& d);

// Markdown tables for people.
std::string markdown(const ExperimentReport& r);
std::string markdown(const FitResult& fit, const std::vector<std::string>& names);
std::string markdown(const SelectionScan& scan);
std::string markdown(std::span<const RuntimeRow> rows);
std::string markdown(std::span<const ForecastRow> rows);
std::string markdown(const MomentSummary& m);
std::string markdown(const RateDiagnostic& d);

}  // namespace micsel::report
