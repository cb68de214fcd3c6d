#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "logem/scenario.hpp"

namespace logem {

enum class OutputFormat { Csv, Json };

/// A parsed and range-checked config document:
///   { "scenario": {...}, "run": {...} }
/// Unknown keys are rejected at every level.
struct RunConfig {
  Scenario scenario;

  int m = 16;
  int fine_m = 512;
  std::vector<int> coarse_m{4, 8, 16, 32, 64};
  std::size_t n_paths = 1000;
  double p = 2.0;
  std::vector<double> q{2.0, 4.0};
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::optional<std::string> out;
  OutputFormat format = OutputFormat::Csv;

  std::string scenario_hash;  // digest of the canonical scenario JSON
};

/// Throws ErrorKind::Configuration with the offending key path.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical form: explicit families, keys sorted.
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);

/// 16 hex digits of FNV-1a over the canonical scenario dump.
std::string scenario_hash(const Scenario& scenario);

OutputFormat parse_format(std::string_view text);

}  // namespace logem
