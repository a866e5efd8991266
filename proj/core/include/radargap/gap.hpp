#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radargap/metrics.hpp"

namespace radargap {

inline constexpr std::size_t kMetricCount = kAllMetrics.size();

/// Per-metric values indexed by `static_cast<std::size_t>(MetricId)`.
using MetricArray = std::array<double, kMetricCount>;

inline constexpr std::size_t metric_index(MetricId id) { return static_cast<std::size_t>(id); }

struct FidelityLevelScores {
  std::array<double, 4> fl{};  ///< FL I .. FL IV, each in [0, 1]

  bool operator==(const FidelityLevelScores&) const = default;
};

struct NormalizationRange {
  double min{0.0};
  double max{1.0};

  bool operator==(const NormalizationRange&) const = default;
};

enum class NormalizationMode { min_max, fixed };

struct GapConfig {
  NormalizationMode mode{NormalizationMode::min_max};
  /// Used in fixed mode; every metric needs an entry with max > min.
  std::array<std::optional<NormalizationRange>, kMetricCount> fixed_ranges{};
  /// Weight of each metric inside its fidelity level.
  MetricArray metric_weights{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  /// Weight of each fidelity level in G.
  std::array<double, 4> level_weights{1, 1, 1, 1};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Result of normalizing one metric column.
struct NormalizedColumn {
  std::vector<double> values;  ///< in [0, 1], 0 = best
  NormalizationRange range;    ///< min/max actually used
};

/// Min-max rescaling of one metric across the compared models (or clamped rescaling against
/// the fixed range). Constant columns map to 0. Higher-is-better metrics are inverted after
/// rescaling so 0 is always best. Throws std::invalid_argument in min-max mode with fewer
/// than two models.
NormalizedColumn normalize(std::span<const double> raw, MetricId id, const GapConfig& config);

/// Weighted mean of the normalized metrics of each level.
/// Throws std::invalid_argument when a level has a metric without a value.
FidelityLevelScores aggregate_levels(const std::array<std::optional<double>, kMetricCount>& normalized,
                                     const GapConfig& config);

FidelityLevelScores aggregate_levels(const MetricArray& normalized, const GapConfig& config);

/// Weighted mean of the four level scores.
double gap(const FidelityLevelScores& scores, const std::array<double, 4>& level_weights = {1, 1, 1, 1});

struct ModelGap {
  std::string model;
  MetricArray raw{};
  MetricArray normalized{};
  std::array<int, kMetricCount> flagged_frames{};
  FidelityLevelScores levels;
  double g{0.0};

  bool operator==(const ModelGap&) const = default;
};

inline constexpr int kReportSchemaVersion = 1;

struct GapReport {
  std::string scenario;
  std::uint64_t seed{0};
  NormalizationMode mode{NormalizationMode::min_max};
  std::array<NormalizationRange, kMetricCount> normalization{};
  std::vector<ModelGap> models;

  bool operator==(const GapReport&) const = default;
};

/// Raw metric results of one model on one scenario.
struct ModelMetrics {
  std::string model;
  std::vector<MetricRecord> records;  ///< all eleven metrics, any order
};

/// Normalizes, aggregates and scores a set of models evaluated on the same scenario.
GapReport build_gap_report(const std::string& scenario, std::uint64_t seed, std::span<const ModelMetrics> models,
                           const GapConfig& config);

}  // namespace radargap
