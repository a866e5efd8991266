#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "radargap/pipeline.hpp"

namespace radargap {

/// Invalid configuration. The message starts with the offending field path, e.g.
/// "config.models[2].kind: unknown model kind 'lidar'".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigSchemaVersion = 1;

struct ScenarioEntry {
  std::string name;
  ScenarioParams params;
  double duration{10.0};  ///< s

  bool operator==(const ScenarioEntry&) const = default;
};

struct EvaluationConfig {
  std::uint64_t seed{1};
  double dt{0.05};
  std::string output_dir{"radargap_out"};
  int jobs{1};
  SensorPose sensor;
  std::vector<ScenarioEntry> scenarios;  ///< evaluation order
  std::vector<ModelSpec> models;
  SensorModelConfig sensor_models;
  PerceptionConfig perception;
  MetricConfig metrics;
  GapConfig gap;

  [[nodiscard]] EvaluationSettings settings() const;
  /// Throws ConfigError naming the offending field. The comparison-set size is checked by
  /// the evaluate command, since simulating a single model is fine.
  void validate() const;
};

/// Built-in defaults: all eight evaluation scenarios, models {irm, ddm, rtm}, seed 1.
EvaluationConfig default_config();

/// Parses a JSON configuration. Omitted fields keep their defaults; unknown fields, wrong
/// types and a missing "seed" (unless `seed_supplied`) are ConfigErrors.
EvaluationConfig parse_config(std::string_view text, bool seed_supplied = false);

/// Default entry for a scenario name, or ConfigError.
ScenarioEntry default_scenario_entry(std::string_view name, const SensorPose& sensor);

}  // namespace radargap
