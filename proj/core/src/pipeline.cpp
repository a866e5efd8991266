#include "radargap/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "radargap/rng.hpp"

namespace radargap {

namespace {

constexpr std::string_view kReferenceLabel = "reference";

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::irm: return "irm";
    case ModelKind::ddm: return "ddm";
    case ModelKind::rtm: return "rtm";
    case ModelKind::reference: return "reference";
  }
  return "unknown";
}

std::optional<ModelKind> model_kind_from_name(std::string_view name) {
  for (ModelKind k : {ModelKind::irm, ModelKind::ddm, ModelKind::rtm, ModelKind::reference}) {
    if (model_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

void SensorModelConfig::validate() const {
  if (irm_points_per_object < 1) throw std::invalid_argument("sensor_models.irm.points_per_object must be >= 1");
  rtm.validate();
  reference.validate();
  if (!(ddm.dt > 0.0)) throw std::invalid_argument("sensor_models.ddm.dt must be > 0");
  if (!(ddm.duration_per_ring >= 10.0 * ddm.dt)) {
    throw std::invalid_argument("sensor_models.ddm.duration_per_ring must cover at least 10 frames");
  }
}

std::uint64_t stage_seed(std::uint64_t master, std::string_view scenario, std::string_view model,
                         std::string_view stage) {
  return derive_seed(derive_seed(derive_seed(master, scenario), model), stage);
}

DdmModel train_ddm(const SensorPose& sensor, const SensorModelConfig& config, std::uint64_t master_seed) {
  config.validate();
  const auto scenarios = build_training_scenarios(sensor, config.ddm.dt, config.ddm.duration_per_ring);
  const auto samples =
      collect_ddm_training(scenarios, config.rtm, config.reference, derive_seed(master_seed, "ddm.training"));
  DdmFitOptions fit = config.ddm.fit;
  fit.range_max = sensor.range_max;
  fit.gmm.seed = derive_seed(master_seed, "ddm.fit");
  return ddm_fit(samples, fit);
}

std::vector<PointCloud> simulate_reference(const Scenario& scenario, const SensorModelConfig& config,
                                           std::uint64_t master_seed) {
  Rng rng(stage_seed(master_seed, scenario.name, kReferenceLabel, "sensor"));
  std::vector<PointCloud> out;
  out.reserve(scenario.frames.size());
  for (const auto& frame : scenario.frames) {
    out.push_back(reference_detect(frame, scenario.sensor, config.rtm, config.reference, rng));
  }
  return out;
}

std::vector<PointCloud> simulate_model(const Scenario& scenario, const ModelSpec& model,
                                       const SensorModelConfig& config, std::uint64_t master_seed,
                                       const DdmModel* ddm) {
  config.validate();
  if (model.name.empty()) throw std::invalid_argument("model name must not be empty");
  if (!(model.position_noise >= 0.0)) throw std::invalid_argument("model '" + model.name + "': position_noise must be >= 0");

  std::vector<PointCloud> out;
  out.reserve(scenario.frames.size());
  Rng rng(stage_seed(master_seed, scenario.name, model.name, "sensor"));
  switch (model.kind) {
    case ModelKind::irm:
      for (const auto& f : scenario.frames) out.push_back(irm_detect(f, scenario.sensor, config.irm_points_per_object));
      break;
    case ModelKind::rtm:
      for (const auto& f : scenario.frames) out.push_back(rtm_detect(f, scenario.sensor, config.rtm, rng));
      break;
    case ModelKind::ddm:
      if (ddm == nullptr) throw std::invalid_argument("model '" + model.name + "': no trained data-driven model");
      for (const auto& f : scenario.frames) out.push_back(ddm_sample(f, scenario.sensor, *ddm, rng));
      break;
    case ModelKind::reference: {
      out = simulate_reference(scenario, config, master_seed);
      if (model.position_noise > 0.0) {
        Rng jitter(stage_seed(master_seed, scenario.name, model.name, "jitter"));
        for (auto& cloud : out) cloud = jitter_positions(cloud, scenario.sensor, model.position_noise, jitter);
      }
      break;
    }
  }
  return out;
}

ScenarioEvaluation evaluate_scenario_detailed(const Scenario& scenario, std::span<const ModelSpec> models,
                                              const EvaluationSettings& settings, const DdmModel* ddm) {
  settings.models.validate();
  settings.metrics.validate();
  settings.gap.validate();
  if (models.empty()) throw std::invalid_argument("evaluate_scenario: no models");
  if (settings.gap.mode == NormalizationMode::min_max && models.size() < 2) {
    throw std::invalid_argument("evaluate_scenario: min-max normalization needs at least two models or fixed ranges");
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (models[i].name == models[j].name) throw std::invalid_argument("duplicate model name '" + models[i].name + "'");
    }
  }

  ScenarioEvaluation eval;
  eval.reference_clouds = simulate_reference(scenario, settings.models, settings.seed);
  const bool any = std::any_of(eval.reference_clouds.begin(), eval.reference_clouds.end(),
                               [](const PointCloud& c) { return !c.detections.empty(); });
  if (!any) {
    throw std::invalid_argument("scenario '" + scenario.name + "' is unevaluable: the reference sensor never detects anything");
  }
  eval.reference_tracks =
      run_perception(eval.reference_clouds, scenario.frames, scenario.sensor, scenario.dt, settings.perception);

  std::vector<ModelMetrics> metrics;
  for (const auto& spec : models) {
    ModelRun run;
    run.spec = spec;
    try {
      run.clouds = simulate_model(scenario, spec, settings.models, settings.seed, ddm);
      run.tracks = run_perception(run.clouds, scenario.frames, scenario.sensor, scenario.dt, settings.perception);
      run.records = implicit_metrics(eval.reference_tracks, run.tracks, settings.metrics);
      auto expl = explicit_metrics(eval.reference_clouds, run.clouds, scenario.sensor, settings.metrics);
      run.records.insert(run.records.end(), expl.begin(), expl.end());
    } catch (const std::exception& e) {
      throw std::invalid_argument("scenario '" + scenario.name + "', model '" + spec.name + "': " + e.what());
    }
    std::sort(run.records.begin(), run.records.end(),
              [](const MetricRecord& a, const MetricRecord& b) { return a.id < b.id; });
    metrics.push_back({spec.name, run.records});
    eval.runs.push_back(std::move(run));
  }
  eval.report = build_gap_report(scenario.name, settings.seed, metrics, settings.gap);
  return eval;
}

GapReport evaluate_scenario(const Scenario& scenario, std::span<const ModelSpec> models,
                            const EvaluationSettings& settings, const DdmModel* ddm) {
  return evaluate_scenario_detailed(scenario, models, settings, ddm).report;
}

}  // namespace radargap
