#include "radargap/config.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace radargap {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

/// Reads the fields of one JSON object, tracking which keys were consumed so that
/// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_fail(path_, "expected an object");
  }

  [[nodiscard]] std::string child(const std::string& key) const { return path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) config_fail(child(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) config_fail(child(key), "expected a finite number");
    }
  }

  void degrees(const std::string& key, double& radians) {
    if (const json* v = find(key)) {
      if (!v->is_number()) config_fail(child(key), "expected a number (degrees)");
      radians = deg_to_rad(v->get<double>());
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) config_fail(child(key), "expected an integer");
      const auto value = v->get<std::int64_t>();
      if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
        config_fail(child(key), "integer out of range");
      }
      out = static_cast<int>(value);
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) config_fail(child(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) config_fail(child(key), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

/// Runs a validate() and re-labels its message with the config path.
template <typename F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    config_fail(path, e.what());
  }
}

void read_sensor(const json& j, const std::string& path, SensorPose& s) {
  ObjectReader r(j, path);
  r.number("x", s.x);
  r.number("y", s.y);
  r.degrees("yaw_deg", s.yaw);
  r.degrees("fov_deg", s.fov_azimuth);
  r.number("range_max", s.range_max);
  r.finish();
  if (!(s.fov_azimuth > 0.0 && s.fov_azimuth <= std::numbers::pi)) config_fail(path + ".fov_deg", "must be in (0, 180]");
  if (!(s.range_max > 0.0)) config_fail(path + ".range_max", "must be > 0");
}

ScenarioEntry read_scenario_entry(const json& j, const std::string& path, const SensorPose& sensor) {
  if (j.is_string()) {
    try {
      return default_scenario_entry(j.get<std::string>(), sensor);
    } catch (const ConfigError& e) {
      config_fail(path, e.what());
    }
  }
  ObjectReader r(j, path);
  std::string name;
  r.string("name", name);
  if (name.empty()) config_fail(path + ".name", "required");
  ScenarioEntry e;
  try {
    e = default_scenario_entry(name, sensor);
  } catch (const ConfigError& err) {
    config_fail(path + ".name", err.what());
  }
  r.number("duration", e.duration);
  r.number("ego_speed", e.params.ego_speed);
  r.number("target_speed", e.params.target_speed);
  r.number("initial_range", e.params.initial_range);
  r.number("lateral_offset", e.params.lateral_offset);
  r.number("lemniscate_focus", e.params.lemniscate_focus);
  r.number("lemniscate_center", e.params.lemniscate_center);
  r.number("target_length", e.params.target_length);
  r.number("target_width", e.params.target_width);
  r.finish();
  return e;
}

ModelSpec read_model(const json& j, const std::string& path) {
  ModelSpec m;
  if (j.is_string()) {
    m.name = j.get<std::string>();
    const auto kind = model_kind_from_name(m.name);
    if (!kind) config_fail(path, "unknown model '" + m.name + "' (expected irm, ddm, rtm or reference)");
    m.kind = *kind;
    return m;
  }
  ObjectReader r(j, path);
  std::string kind_name;
  r.string("name", m.name);
  r.string("kind", kind_name);
  r.number("position_noise", m.position_noise);
  r.finish();
  if (m.name.empty()) config_fail(path + ".name", "required");
  if (kind_name.empty()) kind_name = m.name;
  const auto kind = model_kind_from_name(kind_name);
  if (!kind) config_fail(path + ".kind", "unknown model kind '" + kind_name + "'");
  m.kind = *kind;
  if (!(m.position_noise >= 0.0)) config_fail(path + ".position_noise", "must be >= 0");
  if (m.position_noise > 0.0 && m.kind != ModelKind::reference) {
    config_fail(path + ".position_noise", "only applies to the reference kind");
  }
  return m;
}

void read_rtm(const json& j, const std::string& path, RtmParams& p) {
  ObjectReader r(j, path);
  r.integer("ray_count", p.ray_count);
  r.number("tx_power", p.tx_power_term);
  r.number("gain", p.gain_term);
  r.number("wavelength", p.wavelength);
  r.number("noise_power", p.noise_power);
  r.number("snr_threshold_db", p.snr_threshold);
  r.number("rcs_per_unit_length", p.rcs_per_unit_length);
  double ramp = 10.0;
  r.number("detection_ramp_db", ramp);
  if (!(ramp > 0.0)) config_fail(r.child("detection_ramp_db"), "must be > 0");
  p.detection_probability_curve = DetectionCurve::ramp(p.snr_threshold, ramp);
  if (const json* curve = r.find("detection_curve")) {
    if (j.contains("detection_ramp_db")) {
      config_fail(r.child("detection_curve"), "give either detection_curve or detection_ramp_db");
    }
    if (!curve->is_array() || curve->empty()) config_fail(r.child("detection_curve"), "expected [[snr_db, p], ...]");
    p.detection_probability_curve.points.clear();
    for (std::size_t i = 0; i < curve->size(); ++i) {
      const auto& pt = (*curve)[i];
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        config_fail(r.child("detection_curve") + "[" + std::to_string(i) + "]", "expected [snr_db, p]");
      }
      p.detection_probability_curve.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }
  }
  r.finish();
  checked(path, [&] { p.validate(); });
}

void read_reference(const json& j, const std::string& path, ReferenceNoise& n) {
  ObjectReader r(j, path);
  r.number("sigma_range", n.sigma_range);
  r.degrees("sigma_azimuth_deg", n.sigma_azimuth);
  r.number("sigma_doppler", n.sigma_doppler);
  r.number("dropout", n.dropout);
  r.number("clutter_rate", n.clutter_rate);
  r.finish();
  checked(path, [&] { n.validate(); });
}

void read_ddm(const json& j, const std::string& path, DdmTrainingConfig& d) {
  ObjectReader r(j, path);
  r.integer("aspect_bins", d.fit.aspect_bins);
  r.integer("range_bins", d.fit.range_bins);
  r.integer("max_count", d.fit.max_count);
  r.number("association_gate", d.fit.association_gate);
  r.integer("max_components", d.fit.gmm.max_components);
  r.integer("max_iterations", d.fit.gmm.max_iterations);
  r.number("tolerance", d.fit.gmm.tolerance);
  r.number("training_dt", d.dt);
  r.number("training_duration_per_ring", d.duration_per_ring);
  r.finish();
  if (d.fit.aspect_bins < 1) config_fail(path + ".aspect_bins", "must be >= 1");
  if (d.fit.range_bins < 1) config_fail(path + ".range_bins", "must be >= 1");
  if (d.fit.max_count < 1) config_fail(path + ".max_count", "must be >= 1");
  if (!(d.fit.association_gate >= 0.0)) config_fail(path + ".association_gate", "must be >= 0");
  if (d.fit.gmm.max_components < 1) config_fail(path + ".max_components", "must be >= 1");
  if (d.fit.gmm.max_iterations < 1) config_fail(path + ".max_iterations", "must be >= 1");
  if (!(d.fit.gmm.tolerance > 0.0)) config_fail(path + ".tolerance", "must be > 0");
}

void read_sensor_models(const json& j, const std::string& path, SensorModelConfig& c) {
  ObjectReader r(j, path);
  if (const json* irm = r.find("irm")) {
    ObjectReader ir(*irm, r.child("irm"));
    ir.integer("points_per_object", c.irm_points_per_object);
    ir.finish();
    if (c.irm_points_per_object < 1) config_fail(ir.child("points_per_object"), "must be >= 1");
  }
  if (const json* v = r.find("rtm")) read_rtm(*v, r.child("rtm"), c.rtm);
  if (const json* v = r.find("reference")) read_reference(*v, r.child("reference"), c.reference);
  if (const json* v = r.find("ddm")) read_ddm(*v, r.child("ddm"), c.ddm);
  r.finish();
  checked(path, [&] { c.validate(); });
}

void read_perception(const json& j, const std::string& path, PerceptionConfig& p) {
  ObjectReader r(j, path);
  if (const json* v = r.find("clustering")) {
    ObjectReader c(*v, r.child("clustering"));
    c.number("eps", p.clustering.eps);
    c.integer("min_pts", p.clustering.min_pts);
    c.number("doppler_scale", p.clustering.doppler_scale);
    c.finish();
    if (!(p.clustering.eps > 0.0)) config_fail(c.child("eps"), "must be > 0");
    if (p.clustering.min_pts < 1) config_fail(c.child("min_pts"), "must be >= 1");
    if (!(p.clustering.doppler_scale >= 0.0)) config_fail(c.child("doppler_scale"), "must be >= 0");
  }
  if (const json* v = r.find("tracker")) {
    auto& t = p.tracker;
    ObjectReader c(*v, r.child("tracker"));
    c.number("gate", t.gate);
    c.integer("confirm_hits", t.confirm_hits);
    c.integer("confirm_window", t.confirm_window);
    c.integer("max_misses", t.max_misses);
    c.number("process_accel_sigma", t.process_accel_sigma);
    c.number("measurement_sigma", t.measurement_sigma);
    c.number("initial_speed_sigma", t.initial_speed_sigma);
    c.number("shape_smoothing", t.shape_smoothing);
    c.number("min_extent", t.min_extent);
    c.finish();
    if (!(t.gate > 0.0)) config_fail(c.child("gate"), "must be > 0");
    if (t.confirm_window < 1 || t.confirm_window > 32) config_fail(c.child("confirm_window"), "must be in [1, 32]");
    if (t.confirm_hits < 1 || t.confirm_hits > t.confirm_window) {
      config_fail(c.child("confirm_hits"), "must be in [1, confirm_window]");
    }
    if (t.max_misses < 1) config_fail(c.child("max_misses"), "must be >= 1");
    if (!(t.process_accel_sigma > 0.0)) config_fail(c.child("process_accel_sigma"), "must be > 0");
    if (!(t.measurement_sigma > 0.0)) config_fail(c.child("measurement_sigma"), "must be > 0");
    if (!(t.initial_speed_sigma > 0.0)) config_fail(c.child("initial_speed_sigma"), "must be > 0");
    if (!(t.shape_smoothing > 0.0 && t.shape_smoothing <= 1.0)) config_fail(c.child("shape_smoothing"), "must be in (0, 1]");
    if (!(t.min_extent > 0.0)) config_fail(c.child("min_extent"), "must be > 0");
  }
  r.finish();
}

void read_metrics(const json& j, const std::string& path, MetricConfig& m) {
  ObjectReader r(j, path);
  r.number("doppler_weight", m.doppler_weight);
  double v = 0.0;
  if (j.contains("empty_cap")) {
    r.number("empty_cap", v);
    m.empty_cap = v;
  }
  if (j.contains("empty_cap_azimuth_deg")) {
    r.degrees("empty_cap_azimuth_deg", v);
    m.empty_cap_azimuth = v;
  }
  r.number("empty_cap_doppler", m.empty_cap_doppler);
  r.number("ospa_p", m.ospa_p);
  r.number("ospa_c", m.ospa_c);
  r.number("match_gate", m.match_gate);
  r.finish();
  checked(path, [&] { m.validate(); });
}

MetricId metric_key(const std::string& path, const std::string& key) {
  const auto id = metric_from_name(key);
  if (!id) config_fail(path + "." + key, "unknown metric");
  return *id;
}

void read_gap(const json& j, const std::string& path, GapConfig& g) {
  ObjectReader r(j, path);
  std::string mode = "min_max";
  r.string("normalization", mode);
  if (mode == "min_max") {
    g.mode = NormalizationMode::min_max;
  } else if (mode == "fixed") {
    g.mode = NormalizationMode::fixed;
  } else {
    config_fail(r.child("normalization"), "expected \"min_max\" or \"fixed\"");
  }
  if (const json* v = r.find("fixed_ranges")) {
    const auto p = r.child("fixed_ranges");
    if (!v->is_object()) config_fail(p, "expected an object of [min, max] pairs");
    for (const auto& [key, range] : v->items()) {
      const auto id = metric_key(p, key);
      if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number()) {
        config_fail(p + "." + key, "expected [min, max]");
      }
      g.fixed_ranges[metric_index(id)] = NormalizationRange{range[0].get<double>(), range[1].get<double>()};
    }
  }
  if (const json* v = r.find("metric_weights")) {
    const auto p = r.child("metric_weights");
    if (!v->is_object()) config_fail(p, "expected an object of weights");
    for (const auto& [key, w] : v->items()) {
      const auto id = metric_key(p, key);
      if (!w.is_number()) config_fail(p + "." + key, "expected a number");
      g.metric_weights[metric_index(id)] = w.get<double>();
    }
  }
  if (const json* v = r.find("level_weights")) {
    const auto p = r.child("level_weights");
    if (!v->is_array() || v->size() != 4) config_fail(p, "expected four numbers");
    for (std::size_t i = 0; i < 4; ++i) {
      if (!(*v)[i].is_number()) config_fail(p + "[" + std::to_string(i) + "]", "expected a number");
      g.level_weights[i] = (*v)[i].get<double>();
    }
  }
  r.finish();
  checked(path, [&] { g.validate(); });
}

}  // namespace

ScenarioEntry default_scenario_entry(std::string_view name, const SensorPose& sensor) {
  if (!is_scenario_name(name)) throw ConfigError("unknown scenario '" + std::string(name) + "'");
  ScenarioEntry e;
  e.name = std::string(name);
  e.params = default_scenario_params(name);
  e.params.sensor = sensor;
  e.duration = default_duration(name);
  return e;
}

EvaluationSettings EvaluationConfig::settings() const {
  EvaluationSettings s;
  s.models = sensor_models;
  s.perception = perception;
  s.metrics = metrics;
  s.gap = gap;
  s.seed = seed;
  return s;
}

void EvaluationConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("config.dt: must be > 0");
  if (jobs < 1) throw ConfigError("config.jobs: must be >= 1");
  if (scenarios.empty()) throw ConfigError("config.scenarios: at least one scenario is required");
  if (models.empty()) throw ConfigError("config.models: at least one model is required");
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (models[i].name == models[k].name) {
        throw ConfigError("config.models[" + std::to_string(i) + "].name: duplicate model '" + models[i].name + "'");
      }
    }
  }
  checked("config.sensor_models", [&] { sensor_models.validate(); });
  checked("config.metrics", [&] { metrics.validate(); });
  checked("config.gap", [&] { gap.validate(); });
}

EvaluationConfig default_config() {
  EvaluationConfig c;
  for (auto name : kScenarioNames) c.scenarios.push_back(default_scenario_entry(name, c.sensor));
  c.models = {{"irm", ModelKind::irm}, {"ddm", ModelKind::ddm}, {"rtm", ModelKind::rtm}};
  return c;
}

EvaluationConfig parse_config(std::string_view text, bool seed_supplied) {
  const json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config: not valid JSON");
  EvaluationConfig c = default_config();
  ObjectReader r(doc, "config");

  int version = 0;
  r.integer("schema_version", version);
  if (version != kConfigSchemaVersion) {
    config_fail("config.schema_version", "must be " + std::to_string(kConfigSchemaVersion));
  }
  if (const json* seed = r.find("seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0)) {
      config_fail("config.seed", "expected a non-negative integer");
    }
    c.seed = seed->get<std::uint64_t>();
  } else if (!seed_supplied) {
    config_fail("config.seed", "required (or pass --seed)");
  }
  r.number("dt", c.dt);
  r.string("output_dir", c.output_dir);
  r.integer("jobs", c.jobs);
  if (const json* v = r.find("sensor")) read_sensor(*v, "config.sensor", c.sensor);

  if (const json* v = r.find("scenarios")) {
    if (!v->is_array()) config_fail("config.scenarios", "expected an array");
    c.scenarios.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.scenarios.push_back(read_scenario_entry((*v)[i], "config.scenarios[" + std::to_string(i) + "]", c.sensor));
    }
  } else {
    for (auto& e : c.scenarios) e.params.sensor = c.sensor;
  }
  if (const json* v = r.find("models")) {
    if (!v->is_array()) config_fail("config.models", "expected an array");
    c.models.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.models.push_back(read_model((*v)[i], "config.models[" + std::to_string(i) + "]"));
    }
  }
  if (const json* v = r.find("sensor_models")) read_sensor_models(*v, "config.sensor_models", c.sensor_models);
  if (const json* v = r.find("perception")) read_perception(*v, "config.perception", c.perception);
  if (const json* v = r.find("metrics")) read_metrics(*v, "config.metrics", c.metrics);
  if (const json* v = r.find("gap")) read_gap(*v, "config.gap", c.gap);
  r.finish();

  c.validate();
  return c;
}

}  // namespace radargap
