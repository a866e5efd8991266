#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radargap/config.hpp"
#include "radargap/gap.hpp"

namespace radargap {

/// Values given on the command line; each overrides the configuration file.
struct CliOverrides {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::optional<std::vector<std::string>> scenarios;
  std::optional<std::vector<std::string>> models;
};

inline constexpr const char* kOutputDirEnv = "RADARGAP_OUT";

/// Resolves the effective configuration. Output directory precedence:
/// --out, then the RADARGAP_OUT environment variable, then the config file.
/// --scenarios / --models select by name; a model name that is not configured but names a
/// model kind is added with default settings. Throws ConfigError.
EvaluationConfig resolve_config(const CliOverrides& cli);

Scenario build_configured_scenario(const ScenarioEntry& entry, double dt);

/// Writes, per scenario, `scenario.jsonl`, and per model `<model>.detections.jsonl` and
/// `<model>.tracks.jsonl` under `<out>/<scenario>/`. Returns the written paths.
std::vector<std::filesystem::path> cmd_simulate(const EvaluationConfig& config, std::ostream& log);

struct EvaluateResult {
  std::vector<GapReport> reports;  ///< successful scenarios, in config order
  std::vector<std::string> errors;
};

/// Evaluates every configured scenario (up to `config.jobs` in parallel), writing
/// `<out>/<scenario>/report.json` per scenario and `<out>/summary.csv` (written last, by the
/// calling thread only).
EvaluateResult cmd_evaluate(const EvaluationConfig& config, std::ostream& log);

enum class ExportFormat { csv, chart_data };

/// Flat export of report files. An empty list yields an empty string and a warning on `log`.
/// Throws FormatError for a malformed report.
std::string cmd_report(std::span<const std::filesystem::path> reports, ExportFormat format, std::ostream& log);

}  // namespace radargap
