#include "radargap/sensor_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace radargap {

Detection detect_point(Vec2 world_point, const ObjectState& object, const SensorWorldPose& pose) {
  const auto m = measure_point(world_point, object.velocity(), pose);
  return {m.range, m.azimuth, m.radial_velocity};
}

bool detections_in_fov(const PointCloud& cloud, const SensorPose& sensor) {
  return std::all_of(cloud.detections.begin(), cloud.detections.end(), [&](const Detection& d) {
    return std::isfinite(d.range) && std::isfinite(d.azimuth) && std::isfinite(d.doppler) && d.range > 0.0 &&
           d.range <= sensor.range_max && std::abs(d.azimuth) <= sensor.fov_azimuth;
  });
}

PointCloud irm_detect(const Frame& frame, const SensorPose& sensor, int points_per_object) {
  if (points_per_object < 1) throw std::invalid_argument("irm_detect: points_per_object must be >= 1");
  const auto pose = sensor_world_pose(frame.ego, sensor);
  const auto vis = frame_visibility(frame, sensor);

  PointCloud cloud{frame.index, frame.timestamp, {}};
  for (std::size_t i = 0; i < frame.targets.size(); ++i) {
    if (vis[i] <= 0.0) continue;
    const auto& target = frame.targets[i];
    const OrientedBox box = target.box();
    const double step = box.perimeter() / points_per_object;
    for (int k = 0; k < points_per_object; ++k) {
      const Detection d = detect_point(box.perimeter_point((k + 0.5) * step), target, pose);
      if (pose.in_fov(d.range, d.azimuth)) cloud.detections.push_back(d);
    }
  }
  return cloud;
}

// -------------------------------------------------------------------------------------------

double DetectionCurve::operator()(double snr_db) const {
  if (points.empty()) return 1.0;
  if (snr_db <= points.front().first) return points.front().second;
  if (snr_db >= points.back().first) return points.back().second;
  const auto hi = std::upper_bound(points.begin(), points.end(), snr_db,
                                   [](double v, const auto& pt) { return v < pt.first; });
  const auto lo = std::prev(hi);
  const double t = (snr_db - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

DetectionCurve DetectionCurve::ramp(double threshold_db, double width_db) {
  return {{{threshold_db, 0.0}, {threshold_db + width_db, 1.0}}};
}

void RtmParams::validate() const {
  if (ray_count < 16) throw std::invalid_argument("rtm: ray_count must be >= 16");
  if (!(noise_power > 0.0)) throw std::invalid_argument("rtm: noise_power must be > 0");
  if (!(tx_power_term > 0.0) || !(gain_term > 0.0) || !(wavelength > 0.0)) {
    throw std::invalid_argument("rtm: radar-equation terms must be > 0");
  }
  if (!(rcs_per_unit_length >= 0.0)) throw std::invalid_argument("rtm: rcs_per_unit_length must be >= 0");
  if (!std::isfinite(snr_threshold)) throw std::invalid_argument("rtm: snr_threshold must be finite");
  const auto& pts = detection_probability_curve.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].second >= 0.0 && pts[i].second <= 1.0)) {
      throw std::invalid_argument("rtm: detection probabilities must lie in [0, 1]");
    }
    if (i > 0 && !(pts[i].first > pts[i - 1].first)) {
      throw std::invalid_argument("rtm: detection curve SNR points must be strictly increasing");
    }
    if (i > 0 && pts[i].second < pts[i - 1].second) {
      throw std::invalid_argument("rtm: detection probability must be non-decreasing in SNR");
    }
  }
}

double rtm_snr_db(const RtmParams& params, double range, double rcs) {
  constexpr double four_pi_cubed = 64.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi;
  const double num = params.tx_power_term * params.gain_term * params.gain_term * params.wavelength *
                     params.wavelength * rcs;
  const double r2 = range * range;
  const double den = four_pi_cubed * r2 * r2 * params.noise_power;
  return 10.0 * std::log10(num / den);
}

PointCloud rtm_detect(const Frame& frame, const SensorPose& sensor, const RtmParams& params, Rng& rng) {
  params.validate();
  const auto pose = sensor_world_pose(frame.ego, sensor);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double spacing = 2.0 * sensor.fov_azimuth / (params.ray_count - 1);

  std::vector<OrientedBox> boxes;
  boxes.reserve(frame.targets.size());
  for (const auto& t : frame.targets) boxes.push_back(t.box());

  PointCloud cloud{frame.index, frame.timestamp, {}};
  for (int i = 0; i < params.ray_count; ++i) {
    const double azimuth = std::clamp(-sensor.fov_azimuth + spacing * i, -sensor.fov_azimuth, sensor.fov_azimuth);
    const Vec2 dir = heading(pose.yaw + azimuth);

    std::optional<RayHit> best;
    std::size_t best_target = 0;
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      if (boxes[k].contains(pose.position)) continue;
      const auto hit = intersect_ray(pose.position, dir, boxes[k]);
      if (hit && (!best || hit->distance < best->distance)) {
        best = hit;
        best_target = k;
      }
    }
    if (!best || !(best->distance > 0.0) || best->distance > sensor.range_max) continue;

    const double u = uniform(rng);
    const double incidence = std::max(std::abs(dir.dot(best->normal)), 0.1);
    const double illuminated = std::min(best->edge_length, spacing * best->distance / incidence);
    const double snr = rtm_snr_db(params, best->distance, params.rcs_per_unit_length * illuminated);
    if (snr < params.snr_threshold) continue;
    if (!(u < params.detection_probability_curve(snr))) continue;

    const Vec2 rel_velocity = frame.targets[best_target].velocity() - pose.velocity;
    cloud.detections.push_back({best->distance, azimuth, rel_velocity.dot(dir)});
  }
  return cloud;
}

// -------------------------------------------------------------------------------------------

void ReferenceNoise::validate() const {
  if (!(sigma_range >= 0.0) || !(sigma_azimuth >= 0.0) || !(sigma_doppler >= 0.0)) {
    throw std::invalid_argument("reference noise: standard deviations must be >= 0");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("reference noise: dropout must be in [0, 1)");
  if (!(clutter_rate >= 0.0) || !std::isfinite(clutter_rate)) {
    throw std::invalid_argument("reference noise: clutter_rate must be >= 0");
  }
}

PointCloud reference_detect(const Frame& frame, const SensorPose& sensor, const RtmParams& params,
                            const ReferenceNoise& noise, Rng& rng) {
  noise.validate();
  PointCloud ideal = rtm_detect(frame, sensor, params, rng);
  const auto pose = sensor_world_pose(frame.ego, sensor);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  PointCloud cloud{frame.index, frame.timestamp, {}};
  cloud.detections.reserve(ideal.detections.size());
  for (const auto& d : ideal.detections) {
    Detection n = d;
    n.range += noise.sigma_range * gauss(rng);
    n.azimuth += noise.sigma_azimuth * gauss(rng);
    n.doppler += noise.sigma_doppler * gauss(rng);
    const bool dropped = uniform(rng) < noise.dropout;
    if (dropped || !pose.in_fov(n.range, n.azimuth)) continue;
    cloud.detections.push_back(n);
  }

  if (noise.clutter_rate > 0.0) {
    std::poisson_distribution<int> clutter_count(noise.clutter_rate);
    const int count = clutter_count(rng);
    for (int i = 0; i < count; ++i) {
      // (0, range_max]: 1 - u avoids a zero-range point.
      const double r = sensor.range_max * (1.0 - uniform(rng));
      const double az = sensor.fov_azimuth * (2.0 * uniform(rng) - 1.0);
      const double doppler = -pose.velocity.dot(heading(pose.yaw + az));
      cloud.detections.push_back({r, az, doppler});
    }
  }
  return cloud;
}

PointCloud jitter_positions(const PointCloud& cloud, const SensorPose& sensor, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("jitter_positions: sigma must be >= 0");
  if (sigma == 0.0) return cloud;
  std::normal_distribution<double> gauss(0.0, 1.0);
  PointCloud out{cloud.frame_index, cloud.timestamp, {}};
  for (const auto& d : cloud.detections) {
    const Vec2 p = detection_position(d) + Vec2{gauss(rng), gauss(rng)} * sigma;
    Detection n{p.norm(), std::atan2(p.y, p.x), d.doppler};
    if (n.range > 0.0 && n.range <= sensor.range_max && std::abs(n.azimuth) <= sensor.fov_azimuth) {
      out.detections.push_back(n);
    }
  }
  return out;
}

}  // namespace radargap
