#include "radargap/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace radargap {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw FormatError(source + ":" + std::to_string(line) + ": " + what);
}

json num(double v) { return json(quantize(v)); }

double get_number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw std::invalid_argument(std::string("missing number '") + key + "'");
  return it->get<double>();
}

template <typename T>
T get_integer(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    throw std::invalid_argument(std::string("missing integer '") + key + "'");
  }
  return it->get<T>();
}

std::string get_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw std::invalid_argument(std::string("missing string '") + key + "'");
  return it->get<std::string>();
}

const json& get_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + key + "'");
  return *it;
}

/// Parses every non-empty line; the first must carry `schema`.
std::vector<json> read_records(std::istream& in, std::string_view schema, const std::string& source) {
  std::vector<json> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(source, line_no, "not a JSON object");
    if (records.empty()) {
      const auto it = j.find("schema");
      if (it == j.end() || !it->is_string() || *it != schema) {
        fail(source, line_no, "expected schema \"" + std::string(schema) + "\"");
      }
    }
    records.push_back(std::move(j));
  }
  if (records.empty()) fail(source, line_no, "empty file");
  return records;
}

template <typename F>
void for_each_record(const std::vector<json>& records, const std::string& source, F&& f) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      f(records[i], i);
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      fail(source, i + 1, e.what());
    }
  }
}

json object_to_json(const ObjectState& o) {
  return json{{"id", o.id},         {"x", num(o.x)},           {"y", num(o.y)},          {"yaw", num(o.yaw)},
              {"speed", num(o.speed)}, {"length", num(o.length)}, {"width", num(o.width)}};
}

ObjectState object_from_json(const json& j) {
  ObjectState o;
  o.id = get_integer<int>(j, "id");
  o.x = get_number(j, "x");
  o.y = get_number(j, "y");
  o.yaw = get_number(j, "yaw");
  o.speed = get_number(j, "speed");
  o.length = get_number(j, "length");
  o.width = get_number(j, "width");
  return o;
}

json sensor_to_json(const SensorPose& s) {
  return json{{"x", num(s.x)},
              {"y", num(s.y)},
              {"yaw", num(s.yaw)},
              {"fov_azimuth", num(s.fov_azimuth)},
              {"range_max", num(s.range_max)}};
}

SensorPose sensor_from_json(const json& j) {
  SensorPose s;
  s.x = get_number(j, "x");
  s.y = get_number(j, "y");
  s.yaw = get_number(j, "yaw");
  s.fov_azimuth = get_number(j, "fov_azimuth");
  s.range_max = get_number(j, "range_max");
  return s;
}

void write_line(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

std::string_view mode_name(NormalizationMode m) { return m == NormalizationMode::fixed ? "fixed" : "min_max"; }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

double quantize(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  const double q = std::strtod(buf, nullptr);
  return q == 0.0 ? 0.0 : q;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", quantize(v));
  return buf;
}

// ---- scenario ------------------------------------------------------------------------------

void write_scenario(std::ostream& out, const Scenario& scenario) {
  write_line(out, json{{"schema", kScenarioSchema},
                       {"name", scenario.name},
                       {"dt", num(scenario.dt)},
                       {"sensor", sensor_to_json(scenario.sensor)}});
  for (const auto& f : scenario.frames) {
    json targets = json::array();
    for (const auto& t : f.targets) targets.push_back(object_to_json(t));
    write_line(out, json{{"frame", f.index}, {"t", num(f.timestamp)}, {"ego", object_to_json(f.ego)}, {"targets", targets}});
  }
}

Scenario read_scenario(std::istream& in, const std::string& source) {
  const auto records = read_records(in, kScenarioSchema, source);
  Scenario s;
  for_each_record(records, source, [&](const json& j, std::size_t i) {
    if (i == 0) {
      s.name = get_string(j, "name");
      s.dt = get_number(j, "dt");
      s.sensor = sensor_from_json(get_field(j, "sensor"));
      return;
    }
    Frame f;
    f.index = get_integer<int>(j, "frame");
    f.timestamp = get_number(j, "t");
    f.ego = object_from_json(get_field(j, "ego"));
    for (const auto& t : get_field(j, "targets")) f.targets.push_back(object_from_json(t));
    s.frames.push_back(std::move(f));
  });
  return s;
}

// ---- detections ----------------------------------------------------------------------------

void write_detections(std::ostream& out, const DetectionLog& log) {
  write_line(out, json{{"schema", kDetectionSchema}, {"scenario", log.scenario}, {"model", log.model}});
  for (const auto& c : log.clouds) {
    json dets = json::array();
    for (const auto& d : c.detections) dets.push_back(json::array({num(d.range), num(d.azimuth), num(d.doppler)}));
    write_line(out, json{{"frame", c.frame_index}, {"t", num(c.timestamp)}, {"detections", dets}});
  }
}

DetectionLog read_detections(std::istream& in, const std::string& source) {
  const auto records = read_records(in, kDetectionSchema, source);
  DetectionLog log;
  for_each_record(records, source, [&](const json& j, std::size_t i) {
    if (i == 0) {
      log.scenario = get_string(j, "scenario");
      log.model = get_string(j, "model");
      return;
    }
    PointCloud c;
    c.frame_index = get_integer<int>(j, "frame");
    c.timestamp = get_number(j, "t");
    for (const auto& d : get_field(j, "detections")) {
      if (!d.is_array() || d.size() != 3 || !d[0].is_number() || !d[1].is_number() || !d[2].is_number()) {
        throw std::invalid_argument("detection must be [range, azimuth, doppler]");
      }
      c.detections.push_back({d[0].get<double>(), d[1].get<double>(), d[2].get<double>()});
    }
    log.clouds.push_back(std::move(c));
  });
  return log;
}

// ---- tracks --------------------------------------------------------------------------------

void write_tracks(std::ostream& out, const TrackLog& log) {
  write_line(out, json{{"schema", kTrackSchema}, {"scenario", log.scenario}, {"model", log.model}});
  for (std::size_t k = 0; k < log.frames.size(); ++k) {
    json tracks = json::array();
    for (const auto& t : log.frames[k]) {
      tracks.push_back(json{{"id", t.track_id},
                            {"x", num(t.x)},
                            {"y", num(t.y)},
                            {"vx", num(t.vx)},
                            {"vy", num(t.vy)},
                            {"box", json::array({num(t.box.center.x), num(t.box.center.y), num(t.box.yaw),
                                                 num(t.box.length), num(t.box.width)})},
                            {"age", t.age},
                            {"confirmed", t.confirmed}});
    }
    write_line(out, json{{"frame", k}, {"tracks", tracks}});
  }
}

TrackLog read_tracks(std::istream& in, const std::string& source) {
  const auto records = read_records(in, kTrackSchema, source);
  TrackLog log;
  for_each_record(records, source, [&](const json& j, std::size_t i) {
    if (i == 0) {
      log.scenario = get_string(j, "scenario");
      log.model = get_string(j, "model");
      return;
    }
    if (get_integer<std::size_t>(j, "frame") != log.frames.size()) throw std::invalid_argument("frames out of order");
    std::vector<TrackEstimate> frame;
    for (const auto& t : get_field(j, "tracks")) {
      TrackEstimate e;
      e.track_id = get_integer<int>(t, "id");
      e.x = get_number(t, "x");
      e.y = get_number(t, "y");
      e.vx = get_number(t, "vx");
      e.vy = get_number(t, "vy");
      const auto& b = get_field(t, "box");
      if (!b.is_array() || b.size() != 5) throw std::invalid_argument("box must be [cx, cy, yaw, length, width]");
      for (const auto& v : b) {
        if (!v.is_number()) throw std::invalid_argument("box entries must be numbers");
      }
      e.box = {{b[0].get<double>(), b[1].get<double>()}, b[2].get<double>(), b[3].get<double>(), b[4].get<double>()};
      e.age = get_integer<int>(t, "age");
      const auto& c = get_field(t, "confirmed");
      if (!c.is_boolean()) throw std::invalid_argument("'confirmed' must be a boolean");
      e.confirmed = c.get<bool>();
      frame.push_back(e);
    }
    log.frames.push_back(std::move(frame));
  });
  return log;
}

// ---- reports -------------------------------------------------------------------------------

std::string report_to_json(const GapReport& report) {
  json metrics = json::array();
  json ranges = json::object();
  for (MetricId id : kAllMetrics) {
    const auto& info = metric_info(id);
    metrics.push_back(json{{"name", info.name},
                           {"fidelity_level", info.fidelity_level},
                           {"direction", info.direction == Direction::lower_is_better ? "lower" : "higher"},
                           {"arrow", direction_arrow(info.direction)}});
    const auto& r = report.normalization[metric_index(id)];
    ranges[std::string(info.name)] = json{{"min", num(r.min)}, {"max", num(r.max)}};
  }
  json models = json::array();
  for (const auto& m : report.models) {
    json raw = json::object(), normalized = json::object(), flagged = json::object();
    for (MetricId id : kAllMetrics) {
      const std::string name(metric_info(id).name);
      raw[name] = num(m.raw[metric_index(id)]);
      normalized[name] = num(m.normalized[metric_index(id)]);
      flagged[name] = m.flagged_frames[metric_index(id)];
    }
    json levels = json::object();
    for (std::size_t l = 0; l < 4; ++l) levels["FL" + std::to_string(l + 1)] = num(m.levels.fl[l]);
    models.push_back(json{{"name", m.model},
                          {"raw", raw},
                          {"normalized", normalized},
                          {"flagged_frames", flagged},
                          {"fidelity_levels", levels},
                          {"G", num(m.g)}});
  }
  const json doc{{"schema", kReportSchema},
                 {"scenario", report.scenario},
                 {"seed", report.seed},
                 {"metrics", metrics},
                 {"normalization", json{{"mode", mode_name(report.mode)}, {"ranges", ranges}}},
                 {"models", models}};
  return doc.dump(2) + "\n";
}

GapReport report_from_json(std::string_view text, const std::string& source) {
  const json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw FormatError(source + ": not a JSON document");
  try {
    if (get_string(doc, "schema") != kReportSchema) {
      throw std::invalid_argument("expected schema \"" + std::string(kReportSchema) + "\"");
    }
    GapReport r;
    r.scenario = get_string(doc, "scenario");
    r.seed = get_integer<std::uint64_t>(doc, "seed");
    const auto& norm = get_field(doc, "normalization");
    const auto mode = get_string(norm, "mode");
    if (mode == "min_max") {
      r.mode = NormalizationMode::min_max;
    } else if (mode == "fixed") {
      r.mode = NormalizationMode::fixed;
    } else {
      throw std::invalid_argument("unknown normalization mode '" + mode + "'");
    }
    const auto& ranges = get_field(norm, "ranges");
    for (MetricId id : kAllMetrics) {
      const auto& e = get_field(ranges, std::string(metric_info(id).name).c_str());
      r.normalization[metric_index(id)] = {get_number(e, "min"), get_number(e, "max")};
    }
    for (const auto& m : get_field(doc, "models")) {
      ModelGap g;
      g.model = get_string(m, "name");
      const auto& raw = get_field(m, "raw");
      const auto& normalized = get_field(m, "normalized");
      const auto& flagged = get_field(m, "flagged_frames");
      for (MetricId id : kAllMetrics) {
        const std::string name(metric_info(id).name);
        g.raw[metric_index(id)] = get_number(raw, name.c_str());
        g.normalized[metric_index(id)] = get_number(normalized, name.c_str());
        g.flagged_frames[metric_index(id)] = get_integer<int>(flagged, name.c_str());
      }
      const auto& levels = get_field(m, "fidelity_levels");
      for (std::size_t l = 0; l < 4; ++l) g.levels.fl[l] = get_number(levels, ("FL" + std::to_string(l + 1)).c_str());
      g.g = get_number(m, "G");
      r.models.push_back(std::move(g));
    }
    return r;
  } catch (const std::exception& e) {
    throw FormatError(source + ": " + e.what());
  }
}

std::string summary_csv(std::span<const GapReport> reports) {
  std::string out = "scenario,model,FL1,FL2,FL3,FL4,G\n";
  for (const auto& r : reports) {
    for (const auto& m : r.models) {
      out += csv_field(r.scenario) + "," + csv_field(m.model);
      for (double v : m.levels.fl) out += "," + format_number(v);
      out += "," + format_number(m.g) + "\n";
    }
  }
  return out;
}

std::string metric_table_csv(std::span<const GapReport> reports) {
  std::vector<std::string> models;
  for (const auto& r : reports) {
    for (const auto& m : r.models) {
      if (std::find(models.begin(), models.end(), m.model) == models.end()) models.push_back(m.model);
    }
  }
  std::string out = "scenario,fidelity_level,metric,direction";
  for (const auto& m : models) out += "," + csv_field(m);
  out += "\n";
  static constexpr const char* kLevelNames[] = {"I", "II", "III", "IV"};
  for (const auto& r : reports) {
    for (MetricId id : kAllMetrics) {
      const auto& info = metric_info(id);
      out += csv_field(r.scenario) + "," + kLevelNames[info.fidelity_level - 1] + "," + std::string(info.name) + "," +
             std::string(direction_arrow(info.direction));
      for (const auto& name : models) {
        out += ",";
        for (const auto& m : r.models) {
          if (m.model == name) out += format_number(m.raw[metric_index(id)]);
        }
      }
      out += "\n";
    }
  }
  return out;
}

std::string chart_data_csv(std::span<const GapReport> reports) {
  std::string out = "scenario,model,G\n";
  for (const auto& r : reports) {
    for (const auto& m : r.models) out += csv_field(r.scenario) + "," + csv_field(m.model) + "," + format_number(m.g) + "\n";
  }
  return out;
}

// ---- files ---------------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace radargap
