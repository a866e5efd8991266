#include "radargap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "radargap/io.hpp"

namespace radargap {

namespace {

namespace fs = std::filesystem;

void check_file_name(const std::string& name, const char* what) {
  if (name.empty() || name.find_first_of("/\\") != std::string::npos || name == "." || name == "..") {
    throw ConfigError(std::string(what) + " '" + name + "' cannot be used as a file name");
  }
}

template <typename F>
void run_jobs(std::size_t count, int jobs, F&& job) {
  const auto workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
}

bool needs_ddm(std::span<const ModelSpec> models) {
  return std::any_of(models.begin(), models.end(), [](const ModelSpec& m) { return m.kind == ModelKind::ddm; });
}

}  // namespace

EvaluationConfig resolve_config(const CliOverrides& cli) {
  EvaluationConfig config;
  if (cli.config_path) {
    std::string text;
    try {
      text = read_text_file(*cli.config_path);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    config = parse_config(text, cli.seed.has_value());
  } else {
    config = default_config();
  }
  if (cli.seed) config.seed = *cli.seed;
  if (cli.jobs) config.jobs = *cli.jobs;
  if (cli.out) {
    config.output_dir = *cli.out;
  } else if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    config.output_dir = env;
  }

  if (cli.scenarios) {
    std::vector<ScenarioEntry> selected;
    for (const auto& name : *cli.scenarios) {
      const auto it = std::find_if(config.scenarios.begin(), config.scenarios.end(),
                                   [&](const ScenarioEntry& e) { return e.name == name; });
      if (it != config.scenarios.end()) {
        selected.push_back(*it);
      } else if (is_scenario_name(name)) {
        selected.push_back(default_scenario_entry(name, config.sensor));
      } else {
        throw ConfigError("--scenarios: unknown scenario '" + name + "'");
      }
    }
    config.scenarios = std::move(selected);
  }
  if (cli.models) {
    std::vector<ModelSpec> selected;
    for (const auto& name : *cli.models) {
      const auto it = std::find_if(config.models.begin(), config.models.end(),
                                   [&](const ModelSpec& m) { return m.name == name; });
      if (it != config.models.end()) {
        selected.push_back(*it);
      } else if (const auto kind = model_kind_from_name(name)) {
        selected.push_back({name, *kind});
      } else {
        throw ConfigError("--models: unknown model '" + name + "'");
      }
    }
    config.models = std::move(selected);
  }
  if (config.output_dir.empty()) throw ConfigError("config.output_dir: must not be empty");
  for (const auto& m : config.models) check_file_name(m.name, "model name");
  config.validate();
  return config;
}

Scenario build_configured_scenario(const ScenarioEntry& entry, double dt) {
  return build_scenario(entry.name, entry.params, dt, entry.duration);
}

std::vector<fs::path> cmd_simulate(const EvaluationConfig& config, std::ostream& log) {
  const fs::path out = config.output_dir;
  std::optional<DdmModel> ddm;
  if (needs_ddm(config.models)) ddm = train_ddm(config.sensor, config.sensor_models, config.seed);

  std::vector<fs::path> written;
  for (const auto& entry : config.scenarios) {
    const auto scenario = build_configured_scenario(entry, config.dt);
    const fs::path dir = out / scenario.name;
    std::ostringstream ss;
    write_scenario(ss, scenario);
    write_text_file(dir / "scenario.jsonl", ss.str());
    written.push_back(dir / "scenario.jsonl");
    for (const auto& model : config.models) {
      DetectionLog dlog{scenario.name, model.name,
                        simulate_model(scenario, model, config.sensor_models, config.seed, ddm ? &*ddm : nullptr)};
      TrackLog tlog{scenario.name, model.name,
                    run_perception(dlog.clouds, scenario.frames, scenario.sensor, scenario.dt, config.perception)};
      std::ostringstream ds, ts;
      write_detections(ds, dlog);
      write_tracks(ts, tlog);
      write_text_file(dir / (model.name + ".detections.jsonl"), ds.str());
      write_text_file(dir / (model.name + ".tracks.jsonl"), ts.str());
      written.push_back(dir / (model.name + ".detections.jsonl"));
      written.push_back(dir / (model.name + ".tracks.jsonl"));
      log << "simulated " << scenario.name << " / " << model.name << " (" << dlog.clouds.size() << " frames)\n";
    }
  }
  return written;
}

EvaluateResult cmd_evaluate(const EvaluationConfig& config, std::ostream& log) {
  config.validate();
  if (config.gap.mode == NormalizationMode::min_max && config.models.size() < 2) {
    throw ConfigError("config.models: min-max normalization needs at least two models (or gap.normalization = \"fixed\")");
  }
  const fs::path out = config.output_dir;
  const auto settings = config.settings();
  std::optional<DdmModel> ddm;
  if (needs_ddm(config.models)) ddm = train_ddm(config.sensor, config.sensor_models, config.seed);

  const auto n = config.scenarios.size();
  std::vector<std::optional<GapReport>> reports(n);
  std::vector<std::string> errors(n);
  std::mutex log_mutex;
  run_jobs(n, config.jobs, [&](std::size_t i) {
    const auto& entry = config.scenarios[i];
    try {
      const auto scenario = build_configured_scenario(entry, config.dt);
      auto report = evaluate_scenario(scenario, config.models, settings, ddm ? &*ddm : nullptr);
      write_text_file(out / entry.name / "report.json", report_to_json(report));
      reports[i] = std::move(report);
      const std::lock_guard lock(log_mutex);
      log << "evaluated " << entry.name << "\n";
    } catch (const std::exception& e) {
      errors[i] = "scenario '" + entry.name + "': " + e.what();
    }
  });

  EvaluateResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (reports[i]) result.reports.push_back(std::move(*reports[i]));
    if (!errors[i].empty()) result.errors.push_back(errors[i]);
  }
  write_text_file(out / "summary.csv", summary_csv(result.reports));
  return result;
}

std::string cmd_report(std::span<const fs::path> reports, ExportFormat format, std::ostream& log) {
  if (reports.empty()) {
    log << "warning: no report files given; nothing to export\n";
    return {};
  }
  std::vector<GapReport> loaded;
  for (const auto& path : reports) {
    std::string text;
    try {
      text = read_text_file(path);
    } catch (const std::exception& e) {
      throw FormatError(e.what());
    }
    loaded.push_back(report_from_json(text, path.string()));
  }
  return format == ExportFormat::csv ? metric_table_csv(loaded) : chart_data_csv(loaded);
}

}  // namespace radargap
