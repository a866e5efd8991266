#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radargap/ddm.hpp"
#include "radargap/gap.hpp"
#include "radargap/metrics.hpp"
#include "radargap/perception.hpp"
#include "radargap/scenario.hpp"
#include "radargap/sensor_models.hpp"

namespace radargap {

enum class ModelKind { irm, ddm, rtm, reference };

std::string_view model_kind_name(ModelKind kind);
std::optional<ModelKind> model_kind_from_name(std::string_view name);

/// One sensor model taking part in an evaluation.
struct ModelSpec {
  std::string name;
  ModelKind kind{ModelKind::irm};
  /// Reference kind only: isotropic position noise (m) added on top of the reference
  /// output. With 0 the model reproduces the reference sensor exactly.
  double position_noise{0.0};

  bool operator==(const ModelSpec&) const = default;
};

struct DdmTrainingConfig {
  DdmFitOptions fit;
  double dt{0.1};
  double duration_per_ring{16.0};  ///< s per training ring scenario
};

/// Parameters shared by every model kind.
struct SensorModelConfig {
  int irm_points_per_object{8};
  RtmParams rtm;
  ReferenceNoise reference;
  DdmTrainingConfig ddm;

  void validate() const;
};

/// Sub-seed of one scenario, model and stage. The chain is
/// master -> scenario name -> model name (or "reference") -> stage label.
std::uint64_t stage_seed(std::uint64_t master, std::string_view scenario, std::string_view model,
                         std::string_view stage);

/// Fits the data-driven model on the reference sensor driven over the training scenarios.
DdmModel train_ddm(const SensorPose& sensor, const SensorModelConfig& config, std::uint64_t master_seed);

/// Reference-sensor clouds for every frame of `scenario`.
std::vector<PointCloud> simulate_reference(const Scenario& scenario, const SensorModelConfig& config,
                                           std::uint64_t master_seed);

/// Clouds of one model for every frame. `ddm` must be set for the ddm kind.
std::vector<PointCloud> simulate_model(const Scenario& scenario, const ModelSpec& model,
                                       const SensorModelConfig& config, std::uint64_t master_seed,
                                       const DdmModel* ddm = nullptr);

struct EvaluationSettings {
  SensorModelConfig models;
  PerceptionConfig perception;
  MetricConfig metrics;
  GapConfig gap;
  std::uint64_t seed{1};
};

struct ModelRun {
  ModelSpec spec;
  std::vector<PointCloud> clouds;
  std::vector<std::vector<TrackEstimate>> tracks;
  std::vector<MetricRecord> records;
};

struct ScenarioEvaluation {
  GapReport report;
  std::vector<PointCloud> reference_clouds;
  std::vector<std::vector<TrackEstimate>> reference_tracks;
  std::vector<ModelRun> runs;
};

/// Full pipeline on one scenario: reference clouds, per-model clouds, perception on each,
/// the eleven metrics, normalization, level aggregation and G. Throws std::invalid_argument
/// when the reference sensor never detects anything (the scenario cannot be evaluated) or
/// when normalization has no comparison set.
ScenarioEvaluation evaluate_scenario_detailed(const Scenario& scenario, std::span<const ModelSpec> models,
                                              const EvaluationSettings& settings, const DdmModel* ddm = nullptr);

GapReport evaluate_scenario(const Scenario& scenario, std::span<const ModelSpec> models,
                            const EvaluationSettings& settings, const DdmModel* ddm = nullptr);

}  // namespace radargap
