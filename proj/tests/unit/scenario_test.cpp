#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "radargap/scenario.hpp"

using namespace radargap;

namespace {

/// Same state advanced by `h` seconds at constant velocity.
ObjectState advance(const ObjectState& s, double h) {
  ObjectState out = s;
  const Vec2 v = s.velocity();
  out.x += v.x * h;
  out.y += v.y * h;
  return out;
}

/// Independent visibility: perimeter samples from the corner list, line-of-sight by dense
/// segment sampling.
double visibility_oracle(const ObjectState& target, const std::vector<ObjectState>& others, const ObjectState& ego,
                         const SensorPose& sensor) {
  const double c = std::cos(ego.yaw), s = std::sin(ego.yaw);
  const double sx = ego.x + c * sensor.x - s * sensor.y;
  const double sy = ego.y + s * sensor.x + c * sensor.y;
  const double syaw = ego.yaw + sensor.yaw;
  const double hl = target.length / 2, hw = target.width / 2;
  // Front-right, front-left, rear-left, rear-right in the body frame.
  const double corners[5][2] = {{hl, -hw}, {hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
  const double perimeter = 2 * (target.length + target.width);
  int facing = 0, visible = 0;
  for (int i = 0; i < kVisibilitySamples; ++i) {
    double arc = (i + 0.5) * perimeter / kVisibilitySamples;
    int e = 0;
    double edge = 0.0;
    for (;; ++e) {
      edge = std::hypot(corners[e + 1][0] - corners[e][0], corners[e + 1][1] - corners[e][1]);
      if (arc <= edge) break;
      arc -= edge;
    }
    const double u = corners[e][0] + (corners[e + 1][0] - corners[e][0]) * arc / edge;
    const double w = corners[e][1] + (corners[e + 1][1] - corners[e][1]) * arc / edge;
    const double px = target.x + std::cos(target.yaw) * u - std::sin(target.yaw) * w;
    const double py = target.y + std::sin(target.yaw) * u + std::cos(target.yaw) * w;
    if (oracle::segment_hits_rectangle(sx, sy, px, py, target.x, target.y, target.yaw, target.length, target.width)) {
      continue;
    }
    ++facing;
    const double range = std::hypot(px - sx, py - sy);
    const double az = wrap_angle(std::atan2(py - sy, px - sx) - syaw);
    if (range > sensor.range_max || std::abs(az) > sensor.fov_azimuth) continue;
    bool blocked = false;
    for (const auto& o : others) {
      blocked = blocked || oracle::segment_hits_rectangle(sx, sy, px, py, o.x, o.y, o.yaw, o.length, o.width);
    }
    if (!blocked) ++visible;
  }
  return facing == 0 ? 0.0 : static_cast<double>(visible) / facing;
}

}  // namespace

TEST(Scenario, AllEvaluationScenariosBuild) {
  for (auto name : kScenarioNames) {
    const auto sc = build_scenario(name);
    EXPECT_EQ(sc.name, name);
    const auto expected = static_cast<std::size_t>(std::lround(default_duration(name) / 0.05));
    ASSERT_EQ(sc.frames.size(), expected) << name;
    const std::size_t targets = name.ends_with("_s") ? 1u : 2u;
    for (std::size_t k = 0; k < sc.frames.size(); ++k) {
      EXPECT_EQ(sc.frames[k].index, static_cast<int>(k));
      EXPECT_NEAR(sc.frames[k].timestamp, 0.05 * static_cast<double>(k), 1e-12);
      EXPECT_EQ(sc.frames[k].targets.size(), targets) << name;
    }
  }
  EXPECT_EQ(build_scenario("eight_s").frames.size(), 600u);
}

TEST(Scenario, StatedVelocityIsTheCentralChord) {
  for (auto name : kScenarioNames) {
    const auto sc = build_scenario(name);
    for (std::size_t k = 1; k + 1 < sc.frames.size(); ++k) {
      const auto& prev = sc.frames[k - 1];
      const auto& next = sc.frames[k + 1];
      for (std::size_t t = 0; t < sc.frames[k].targets.size(); ++t) {
        const Vec2 fd = (next.targets[t].position() - prev.targets[t].position()) / (2 * sc.dt);
        const Vec2 v = sc.frames[k].targets[t].velocity();
        EXPECT_NEAR(fd.x, v.x, 1e-9) << name << " frame " << k;
        EXPECT_NEAR(fd.y, v.y, 1e-9) << name << " frame " << k;
      }
      const Vec2 ego_fd = (next.ego.position() - prev.ego.position()) / (2 * sc.dt);
      EXPECT_NEAR(ego_fd.x, sc.frames[k].ego.velocity().x, 1e-9);
      EXPECT_NEAR(ego_fd.y, sc.frames[k].ego.velocity().y, 1e-9);
    }
  }
}

TEST(Scenario, RadialVelocityIsTheRangeRate) {
  for (auto name : kScenarioNames) {
    const auto sc = build_scenario(name);
    const double h = sc.dt * 1e-3;
    for (const auto& f : sc.frames) {
      for (const auto& t : f.targets) {
        const auto now = to_sensor_frame(t, f.ego, sc.sensor);
        const auto range_at = [&](double dt) {
          return to_sensor_frame(advance(t, dt), advance(f.ego, dt), sc.sensor).range;
        };
        // Fourth-order central difference; the range curves sharply at a close pass.
        const double fd = (8.0 * (range_at(h) - range_at(-h)) - (range_at(2 * h) - range_at(-2 * h))) / (12.0 * h);
        EXPECT_NEAR(now.radial_velocity, fd, 1e-6 * sc.dt) << name << " frame " << f.index;
      }
    }
  }
}

TEST(Scenario, PolarConventions) {
  ObjectState ego;
  ObjectState target;
  target.x = 10.0;
  target.y = 10.0;
  target.yaw = std::numbers::pi;  // driving towards -x
  target.speed = 2.0;
  const auto p = to_sensor_frame(target, ego, SensorPose{});
  EXPECT_NEAR(p.range, std::sqrt(200.0), 1e-12);
  EXPECT_NEAR(p.azimuth, std::numbers::pi / 4, 1e-12);  // counter-clockwise positive
  EXPECT_LT(p.radial_velocity, 0.0);                   // closing
  EXPECT_NEAR(p.radial_velocity, -2.0 / std::sqrt(2.0), 1e-12);
}

TEST(Scenario, InvalidArgumentsAreRejected) {
  EXPECT_THROW(build_scenario("roundabout_s"), std::invalid_argument);
  EXPECT_THROW(build_scenario("eight_s", 0.0), std::invalid_argument);
  EXPECT_THROW(build_scenario("eight_s", -0.1), std::invalid_argument);
  EXPECT_THROW(build_scenario("eight_s", default_scenario_params("eight_s"), 0.05, 0.2), std::invalid_argument);
  auto far = default_scenario_params("leading_s");
  far.initial_range = 400.0;
  EXPECT_THROW(build_scenario("leading_s", far, 0.05, 10.0), std::invalid_argument);
}

TEST(Scenario, OcclusionScenarioHidesTheFarTarget) {
  const auto sc = build_scenario("occlusion_m");
  double min_far = 1.0, max_far = 0.0;
  for (const auto& f : sc.frames) {
    const auto v = frame_visibility(f, sc.sensor);
    ASSERT_EQ(v.size(), 2u);
    min_far = std::min(min_far, v[1]);
    max_far = std::max(max_far, v[1]);
  }
  EXPECT_EQ(min_far, 0.0);
  EXPECT_EQ(max_far, 1.0);
}

TEST(Scenario, VisibilityMatchesLineOfSightOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> x(3.0, 60.0), y(-30.0, 30.0), yaw(-std::numbers::pi, std::numbers::pi);
  const SensorPose sensor;
  const ObjectState ego;
  int exact = 0, total = 0;
  for (int trial = 0; trial < 150; ++trial) {
    ObjectState target{1, x(rng), y(rng), yaw(rng), 0.0};
    std::vector<ObjectState> others;
    ObjectState blocker{2, 0.0, 0.0, yaw(rng), 0.0};
    // Put the blocker part-way along the line of sight, slightly off-axis.
    const double f = 0.4 + 0.3 * (trial % 5) / 4.0;
    blocker.x = target.x * f + 0.8 * std::sin(trial);
    blocker.y = target.y * f + 0.8 * std::cos(trial);
    if (OrientedBox{blocker.position(), blocker.yaw, blocker.length + 0.5, blocker.width + 0.5}.contains({0, 0}) ||
        (blocker.position() - target.position()).norm() < 6.0) {
      continue;
    }
    others.push_back(blocker);
    const double v = visibility(target, others, ego, sensor);
    const double expected = visibility_oracle(target, others, ego, sensor);
    ++total;
    if (v == expected) ++exact;
    // One sample may flip when a sight line grazes a corner.
    EXPECT_NEAR(v, expected, 1.0 / 8.0 + 1e-12) << "trial " << trial;
  }
  EXPECT_GT(total, 50);
  EXPECT_GE(exact, total * 9 / 10);
}

TEST(Scenario, TrainingSetIsDisjointFromEvaluationSet) {
  const auto training = build_training_scenarios(SensorPose{}, 0.1, 16.0);
  ASSERT_FALSE(training.empty());
  for (const auto& sc : training) {
    EXPECT_FALSE(is_scenario_name(sc.name));
    EXPECT_TRUE(sc.name.starts_with("train_"));
    EXPECT_EQ(sc.frames.front().targets.size(), 1u);
  }
}
