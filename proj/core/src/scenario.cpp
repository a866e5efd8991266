#include "radargap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace radargap {

namespace {

struct Mover {
  int id;
  double length;
  double width;
  std::function<Vec2(double)> path;
  double rest_yaw;
};

ObjectState sample_mover(const Mover& m, double t, double dt) {
  const Vec2 p = m.path(t);
  const Vec2 v = (m.path(t + dt) - m.path(t - dt)) / (2.0 * dt);
  const double speed = v.norm();
  ObjectState s;
  s.id = m.id;
  s.x = p.x;
  s.y = p.y;
  s.speed = speed;
  s.yaw = speed > 1e-9 ? std::atan2(v.y, v.x) : wrap_angle(m.rest_yaw);
  s.length = m.length;
  s.width = m.width;
  return s;
}

auto straight(Vec2 start, Vec2 velocity) {
  return [=](double t) { return start + velocity * t; };
}

// Bernoulli lemniscate (x^2 + y^2)^2 = 2 c^2 (x^2 - y^2) with foci at (+-c, 0), long axis
// turned across the boresight and centered `center` metres ahead of the origin.
auto lemniscate(double focus, double center, double speed) {
  const double a = focus * std::numbers::sqrt2;
  // Arc length of the full curve is ~5.2441151 a.
  const double rate = 2.0 * std::numbers::pi * speed / (5.2441151086 * a);
  return [=](double t) {
    const double s = rate * t;
    const double sn = std::sin(s);
    const double cs = std::cos(s);
    const double den = 1.0 + sn * sn;
    const double lx = a * cs / den;
    const double ly = a * sn * cs / den;
    return Vec2{center + ly, lx};
  };
}

std::vector<Mover> movers_for(std::string_view name, const ScenarioParams& p) {
  const double L = p.target_length;
  const double W = p.target_width;
  const Mover ego_moving{0, 4.5, 1.8, straight({0.0, 0.0}, {p.ego_speed, 0.0}), 0.0};
  const Mover ego_static{0, 4.5, 1.8, [](double) { return Vec2{}; }, 0.0};
  const double v = p.target_speed;

  if (name == "oncoming_s") {
    return {ego_moving, {1, L, W, straight({p.initial_range, p.lateral_offset}, {-v, 0.0}), std::numbers::pi}};
  }
  if (name == "overtake_s") {
    return {ego_moving, {1, L, W, straight({p.initial_range, p.lateral_offset}, {v, 0.0}), 0.0}};
  }
  if (name == "leading_s") {
    return {ego_moving, {1, L, W, straight({p.initial_range, p.lateral_offset}, {v, 0.0}), 0.0}};
  }
  if (name == "eight_s") {
    return {ego_static, {1, L, W, lemniscate(p.lemniscate_focus, p.lemniscate_center, v), 0.0}};
  }
  if (name == "occlusion_m") {
    // Near target crosses left-to-right while a far target crosses right-to-left; the far
    // one disappears behind the near one around the midpoint of the run.
    const double half = 10.0 * v;
    return {ego_static,
            {1, L, W, straight({p.initial_range, -half}, {0.0, v}), 0.5 * std::numbers::pi},
            {2, L, W, straight({p.initial_range + 20.0, half}, {0.0, -v}), -0.5 * std::numbers::pi}};
  }
  if (name == "leading_m") {
    return {ego_moving,
            {1, L, W, straight({p.initial_range, 0.0}, {v, 0.0}), 0.0},
            {2, L, W, straight({p.initial_range + 2.0, p.lateral_offset}, {v, 0.0}), 0.0}};
  }
  if (name == "overtake_m") {
    return {ego_moving,
            {1, L, W, straight({p.initial_range, p.lateral_offset}, {v, 0.0}), 0.0},
            {2, L, W, straight({p.initial_range - 10.0, -p.lateral_offset}, {v + 2.0, 0.0}), 0.0}};
  }
  if (name == "crossing_m") {
    return {ego_moving,
            {1, L, W, straight({p.initial_range, -p.initial_range}, {0.0, v}), 0.5 * std::numbers::pi},
            {2, L, W, straight({p.initial_range + 15.0, p.initial_range + 10.0}, {0.0, -v}),
             -0.5 * std::numbers::pi}};
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

}  // namespace

bool is_scenario_name(std::string_view name) {
  return std::find(kScenarioNames.begin(), kScenarioNames.end(), name) != kScenarioNames.end();
}

ScenarioParams default_scenario_params(std::string_view name) {
  ScenarioParams p;
  if (name == "oncoming_s") {
    p.ego_speed = 8.0;
    p.target_speed = 8.0;
    p.initial_range = 110.0;
    p.lateral_offset = 3.5;
  } else if (name == "overtake_s") {
    p.ego_speed = 15.0;
    p.target_speed = 20.0;
    p.initial_range = -8.0;
    p.lateral_offset = 3.5;
  } else if (name == "leading_s") {
    p.ego_speed = 15.0;
    p.target_speed = 15.0;
    p.initial_range = 20.0;
  } else if (name == "eight_s") {
    p.target_speed = 5.0;
  } else if (name == "occlusion_m") {
    p.target_speed = 2.0;
    p.initial_range = 15.0;
  } else if (name == "leading_m") {
    p.ego_speed = 15.0;
    p.target_speed = 15.0;
    p.initial_range = 25.0;
    p.lateral_offset = 3.5;
  } else if (name == "overtake_m") {
    p.ego_speed = 15.0;
    p.target_speed = 20.0;
    p.initial_range = -8.0;
    p.lateral_offset = 3.5;
  } else if (name == "crossing_m") {
    p.ego_speed = 3.0;
    p.target_speed = 8.0;
    p.initial_range = 30.0;
  } else {
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
  }
  return p;
}

double default_duration(std::string_view name) {
  if (name == "eight_s") return 30.0;
  if (name == "occlusion_m") return 20.0;
  if (name == "oncoming_s") return 12.0;
  if (!is_scenario_name(name)) throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
  return 10.0;
}

namespace {

Scenario sample_scenario(std::string name, const std::vector<Mover>& movers, const SensorPose& sensor,
                         double dt, double duration) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("scenario dt must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("scenario duration must be positive");
  }
  if (duration < 10.0 * dt) throw std::invalid_argument("scenario duration must be at least 10 frames");

  Scenario sc;
  sc.name = std::move(name);
  sc.dt = dt;
  sc.sensor = sensor;
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  sc.frames.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    Frame f;
    f.index = static_cast<int>(k);
    f.timestamp = t;
    f.ego = sample_mover(movers.front(), t, dt);
    for (std::size_t i = 1; i < movers.size(); ++i) f.targets.push_back(sample_mover(movers[i], t, dt));
    sc.frames.push_back(std::move(f));
  }
  return sc;
}

void require_all_targets_visible(const Scenario& sc) {
  const std::size_t targets = sc.frames.front().targets.size();
  std::vector<bool> seen(targets, false);
  for (const auto& f : sc.frames) {
    const auto vis = frame_visibility(f, sc.sensor);
    for (std::size_t i = 0; i < targets; ++i) seen[i] = seen[i] || vis[i] > 0.0;
  }
  for (std::size_t i = 0; i < targets; ++i) {
    if (!seen[i]) {
      throw std::invalid_argument("invalid scenario '" + sc.name + "': target " +
                                  std::to_string(sc.frames.front().targets[i].id) +
                                  " never enters the sensor field of view");
    }
  }
}

}  // namespace

Scenario build_scenario(std::string_view name, const ScenarioParams& params, double dt, double duration) {
  if (!is_scenario_name(name)) throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
  if (!(params.target_length > 0.0) || !(params.target_width > 0.0)) {
    throw std::invalid_argument("target extent must be positive");
  }
  Scenario sc = sample_scenario(std::string(name), movers_for(name, params), params.sensor, dt, duration);
  require_all_targets_visible(sc);
  return sc;
}

std::vector<Scenario> build_training_scenarios(const SensorPose& sensor, double dt, double duration_per_ring) {
  constexpr double kRadius = 4.0;
  constexpr double kSpeed = 5.0;
  const double max_center = sensor.range_max - kRadius - 4.0;
  std::vector<Scenario> out;
  for (const double frac : {0.10, 0.20, 0.35, 0.50, 0.65, 0.80, 1.0}) {
    const double center = std::max(2.0 * kRadius + 2.0, frac * max_center);
    const double rate = kSpeed / kRadius;
    Mover ego{0, 4.5, 1.8, [](double) { return Vec2{}; }, 0.0};
    Mover ring{1, 4.5, 1.8,
               [=](double t) {
                 return Vec2{center + kRadius * std::cos(rate * t), kRadius * std::sin(rate * t)};
               },
               0.0};
    auto sc = sample_scenario("train_ring_" + std::to_string(static_cast<int>(std::lround(center))),
                              {ego, ring}, sensor, dt, duration_per_ring);
    out.push_back(std::move(sc));
  }
  return out;
}

SensorWorldPose sensor_world_pose(const ObjectState& ego, const SensorPose& sensor) {
  SensorWorldPose pose;
  pose.position = ego.position() + rotate({sensor.x, sensor.y}, ego.yaw);
  pose.yaw = wrap_angle(ego.yaw + sensor.yaw);
  pose.velocity = ego.velocity();
  pose.fov_azimuth = sensor.fov_azimuth;
  pose.range_max = sensor.range_max;
  return pose;
}

PolarState measure_point(Vec2 point, Vec2 velocity, const SensorWorldPose& pose) {
  const Vec2 rel = point - pose.position;
  PolarState s;
  s.range = rel.norm();
  s.azimuth = wrap_angle(std::atan2(rel.y, rel.x) - pose.yaw);
  s.radial_velocity = s.range > 0.0 ? (velocity - pose.velocity).dot(rel) / s.range : 0.0;
  return s;
}

PolarState to_sensor_frame(const ObjectState& state, const ObjectState& ego, const SensorPose& sensor) {
  const auto pose = sensor_world_pose(ego, sensor);
  PolarState s = measure_point(state.position(), state.velocity(), pose);
  s.relative_yaw = wrap_angle(state.yaw - pose.yaw);
  return s;
}

double visibility(const ObjectState& target, std::span<const ObjectState> others, const ObjectState& ego,
                  const SensorPose& sensor) {
  const auto pose = sensor_world_pose(ego, sensor);
  const OrientedBox box = target.box();
  if (box.contains(pose.position)) return 0.0;

  const double step = box.perimeter() / kVisibilitySamples;
  int facing = 0;
  int clear = 0;
  for (int i = 0; i < kVisibilitySamples; ++i) {
    const Vec2 p = box.perimeter_point((i + 0.5) * step);
    if (segment_crosses(pose.position, p, box)) continue;  // back side of the target itself
    ++facing;
    const auto m = measure_point(p, {}, pose);
    if (!pose.in_fov(m.range, m.azimuth)) continue;
    const bool blocked = std::any_of(others.begin(), others.end(), [&](const ObjectState& o) {
      return segment_crosses(pose.position, p, o.box());
    });
    if (!blocked) ++clear;
  }
  return facing > 0 ? static_cast<double>(clear) / facing : 0.0;
}

std::vector<double> frame_visibility(const Frame& frame, const SensorPose& sensor) {
  std::vector<double> out;
  out.reserve(frame.targets.size());
  std::vector<ObjectState> others;
  for (std::size_t i = 0; i < frame.targets.size(); ++i) {
    others.clear();
    for (std::size_t j = 0; j < frame.targets.size(); ++j) {
      if (j != i) others.push_back(frame.targets[j]);
    }
    out.push_back(visibility(frame.targets[i], others, frame.ego, sensor));
  }
  return out;
}

}  // namespace radargap
