#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radargap/geometry.hpp"

namespace radargap {

/// Ground-truth kinematic state of one vehicle. The reference point is the rectangle center.
struct ObjectState {
  int id{0};
  double x{0.0};
  double y{0.0};
  double yaw{0.0};    ///< heading, (-pi, pi]
  double speed{0.0};  ///< along the heading, m/s
  double length{4.5};
  double width{1.8};

  [[nodiscard]] Vec2 position() const { return {x, y}; }
  [[nodiscard]] Vec2 velocity() const { return heading(yaw) * speed; }
  [[nodiscard]] OrientedBox box() const { return {{x, y}, yaw, length, width}; }

  bool operator==(const ObjectState&) const = default;
};

/// Radar mount relative to the ego reference point, plus coverage.
struct SensorPose {
  double x{0.0};
  double y{0.0};
  double yaw{0.0};                          ///< boresight relative to the ego heading
  double fov_azimuth{deg_to_rad(60.0)};     ///< half-angle, rad
  double range_max{100.0};

  bool operator==(const SensorPose&) const = default;
};

/// Sensor pose resolved in the world frame for one frame.
struct SensorWorldPose {
  Vec2 position;
  double yaw{0.0};
  Vec2 velocity;
  double fov_azimuth{0.0};
  double range_max{0.0};

  [[nodiscard]] Vec2 to_sensor(Vec2 world) const { return rotate(world - position, -yaw); }
  [[nodiscard]] Vec2 to_world(Vec2 sensor) const { return position + rotate(sensor, yaw); }
  [[nodiscard]] bool in_fov(double range, double azimuth) const {
    return range > 0.0 && range <= range_max && std::abs(azimuth) <= fov_azimuth;
  }
};

struct Frame {
  int index{0};
  double timestamp{0.0};
  ObjectState ego;
  std::vector<ObjectState> targets;

  bool operator==(const Frame&) const = default;
};

struct Scenario {
  std::string name;
  double dt{0.05};
  std::vector<Frame> frames;
  SensorPose sensor;

  bool operator==(const Scenario&) const = default;
};

inline constexpr std::array<std::string_view, 8> kScenarioNames = {
    "oncoming_s", "overtake_s", "leading_s", "eight_s",
    "occlusion_m", "leading_m", "overtake_m", "crossing_m"};

bool is_scenario_name(std::string_view name);

/// Tunables for the scenario generators. Each scenario reads the fields that apply to it;
/// `default_scenario_params` fills in the values used when nothing is overridden.
///
/// - ego_speed: ego speed along +x (m/s); eight_s and occlusion_m keep the ego static.
/// - target_speed: speed of the (first) target.
/// - initial_range: longitudinal start offset of the (first) target relative to the ego.
/// - lateral_offset: lane offset of the target lane (m, +y is left).
/// - lemniscate_focus / lemniscate_center: eight_s path geometry.
struct ScenarioParams {
  double ego_speed{0.0};
  double target_speed{0.0};
  double initial_range{0.0};
  double lateral_offset{0.0};
  double lemniscate_focus{15.0};
  double lemniscate_center{25.0};
  double target_length{4.5};
  double target_width{1.8};
  SensorPose sensor;

  bool operator==(const ScenarioParams&) const = default;
};

ScenarioParams default_scenario_params(std::string_view name);

/// Default run length per scenario (s).
double default_duration(std::string_view name);

/// Builds the ground-truth scenario. Frames are sampled at t_k = k * dt for
/// k < round(duration / dt). Positions lie exactly on the analytic path; the reported
/// speed and yaw are the central chord velocity (p(t+dt) - p(t-dt)) / (2 dt), so frame
/// finite differences agree with the stated velocity.
///
/// Throws std::invalid_argument for an unknown name, non-positive dt, duration < 10 dt,
/// or when some target never becomes visible to the sensor.
Scenario build_scenario(std::string_view name, const ScenarioParams& params, double dt, double duration);

inline Scenario build_scenario(std::string_view name, double dt = 0.05) {
  return build_scenario(name, default_scenario_params(name), dt, default_duration(name));
}

/// Single-target scenarios for fitting the data-driven model. They are disjoint from the
/// evaluation set: the target circles at a ladder of ranges in front of a static ego.
std::vector<Scenario> build_training_scenarios(const SensorPose& sensor, double dt, double duration_per_ring);

SensorWorldPose sensor_world_pose(const ObjectState& ego, const SensorPose& sensor);

/// Polar measurement of an object's reference point.
struct PolarState {
  double range{0.0};
  double azimuth{0.0};          ///< from boresight, CCW positive
  double radial_velocity{0.0};  ///< negative when closing
  double relative_yaw{0.0};
};

PolarState to_sensor_frame(const ObjectState& state, const ObjectState& ego, const SensorPose& sensor);

/// Range, azimuth and Doppler of an arbitrary world point moving with `velocity`.
PolarState measure_point(Vec2 point, Vec2 velocity, const SensorWorldPose& pose);

/// Fraction of the target's sensor-facing shell samples with a clear line of sight inside
/// the field of view. 0 when fully occluded or out of coverage.
double visibility(const ObjectState& target, std::span<const ObjectState> others, const ObjectState& ego,
                  const SensorPose& sensor);

/// Visibility of every target of a frame against the rest of that frame.
std::vector<double> frame_visibility(const Frame& frame, const SensorPose& sensor);

inline constexpr int kVisibilitySamples = 32;

}  // namespace radargap
