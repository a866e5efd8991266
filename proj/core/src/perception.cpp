#include "radargap/perception.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "radargap/assignment.hpp"

namespace radargap {

std::vector<Cluster> cluster(const PointCloud& cloud, const SensorWorldPose& pose, const ClusteringParams& params) {
  if (!(params.eps > 0.0)) throw std::invalid_argument("cluster: eps must be > 0");
  if (params.min_pts < 1) throw std::invalid_argument("cluster: min_pts must be >= 1");

  std::vector<Detection> sorted = cloud.detections;
  std::sort(sorted.begin(), sorted.end(), [](const Detection& a, const Detection& b) {
    return std::tie(a.range, a.azimuth, a.doppler) < std::tie(b.range, b.azimuth, b.doppler);
  });

  const std::size_t n = sorted.size();
  std::vector<ClusterPoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {pose.to_world(detection_position(sorted[i])), sorted[i].doppler};
  }

  const double eps2 = params.eps * params.eps;
  auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 dp = pts[i].position - pts[j].position;
      const double dd = (pts[i].doppler - pts[j].doppler) * params.doppler_scale;
      if (dp.dot(dp) + dd * dd <= eps2) out.push_back(j);
    }
    return out;
  };

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  int next_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    auto seeds = neighbours(i);
    if (static_cast<int>(seeds.size()) < params.min_pts) {
      label[i] = kNoise;
      continue;
    }
    const int c = next_label++;
    label[i] = c;
    std::deque<std::size_t> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const std::size_t j = queue.front();
      queue.pop_front();
      if (label[j] == kNoise) label[j] = c;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = c;
      auto more = neighbours(j);
      if (static_cast<int>(more.size()) >= params.min_pts) queue.insert(queue.end(), more.begin(), more.end());
    }
  }

  std::vector<Cluster> clusters(static_cast<std::size_t>(next_label));
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) clusters[static_cast<std::size_t>(label[i])].points.push_back(pts[i]);
  }
  for (auto& cl : clusters) {
    Vec2 sum;
    double dop = 0.0;
    for (const auto& p : cl.points) {
      sum = sum + p.position;
      dop += p.doppler;
    }
    cl.centroid = sum / static_cast<double>(cl.points.size());
    cl.mean_doppler = dop / static_cast<double>(cl.points.size());
  }
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return std::tie(a.centroid.x, a.centroid.y, a.mean_doppler) < std::tie(b.centroid.x, b.centroid.y, b.mean_doppler);
  });
  return clusters;
}

namespace {

using Vector4 = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;

struct ShapeMeasurement {
  double yaw;
  double length;
  double width;
};

// Principal-axis extent of the cluster points; the longer side is reported as length.
std::optional<ShapeMeasurement> measure_shape(const Cluster& cl) {
  if (cl.points.size() < 2) return std::nullopt;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : cl.points) {
    const Vec2 d = p.position - cl.centroid;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  double yaw = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  const Vec2 axis = heading(yaw);
  const Vec2 perp{-axis.y, axis.x};
  double lo_a = std::numeric_limits<double>::infinity(), hi_a = -lo_a;
  double lo_p = lo_a, hi_p = -lo_a;
  for (const auto& p : cl.points) {
    const Vec2 d = p.position - cl.centroid;
    lo_a = std::min(lo_a, d.dot(axis));
    hi_a = std::max(hi_a, d.dot(axis));
    lo_p = std::min(lo_p, d.dot(perp));
    hi_p = std::max(hi_p, d.dot(perp));
  }
  double length = hi_a - lo_a;
  double width = hi_p - lo_p;
  if (width > length) {
    std::swap(length, width);
    yaw += 0.5 * std::numbers::pi;
  }
  return ShapeMeasurement{wrap_angle(yaw), length, width};
}

void update_shape(Track& t, const Cluster& cl, const TrackerParams& params) {
  const auto m = measure_shape(cl);
  if (!m) return;
  if (!t.has_shape) {
    t.box_yaw = m->yaw;
    t.box_length = m->length;
    t.box_width = m->width;
    t.has_shape = true;
    return;
  }
  // Axis orientation is defined modulo pi: blend on the doubled angle.
  const double a = params.shape_smoothing;
  const Vec2 blended = heading(2.0 * t.box_yaw) * (1.0 - a) + heading(2.0 * m->yaw) * a;
  if (blended.norm() > 1e-12) t.box_yaw = wrap_angle(0.5 * std::atan2(blended.y, blended.x));
  t.box_length = (1.0 - a) * t.box_length + a * m->length;
  t.box_width = (1.0 - a) * t.box_width + a * m->width;
}

Track spawn(const Cluster& cl, int id, const TrackerParams& params) {
  Track t;
  t.id = id;
  t.state = {cl.centroid.x, cl.centroid.y, 0.0, 0.0};
  Eigen::Map<Matrix4> P(t.covariance.data());
  const double pm = params.measurement_sigma * params.measurement_sigma;
  const double pv = params.initial_speed_sigma * params.initial_speed_sigma;
  P = Vector4(pm, pm, pv, pv).asDiagonal();
  t.age = 1;
  t.hit_history = 1u;
  update_shape(t, cl, params);
  return t;
}

void predict(Track& t, double dt, const TrackerParams& params) {
  Eigen::Map<Vector4> x(t.state.data());
  Eigen::Map<Matrix4> P(t.covariance.data());
  Matrix4 F = Matrix4::Identity();
  F(0, 2) = dt;
  F(1, 3) = dt;
  const double q = params.process_accel_sigma * params.process_accel_sigma;
  const double dt2 = dt * dt;
  Matrix4 Q = Matrix4::Zero();
  Q(0, 0) = Q(1, 1) = 0.25 * dt2 * dt2 * q;
  Q(0, 2) = Q(2, 0) = Q(1, 3) = Q(3, 1) = 0.5 * dt2 * dt * q;
  Q(2, 2) = Q(3, 3) = dt2 * q;
  x = F * x;
  P = F * P * F.transpose() + Q;
}

void correct(Track& t, Vec2 z, const TrackerParams& params) {
  Eigen::Map<Vector4> x(t.state.data());
  Eigen::Map<Matrix4> P(t.covariance.data());
  Eigen::Matrix<double, 2, 4> H = Eigen::Matrix<double, 2, 4>::Zero();
  H(0, 0) = H(1, 1) = 1.0;
  const Eigen::Matrix2d R = Eigen::Matrix2d::Identity() * params.measurement_sigma * params.measurement_sigma;
  const Eigen::Vector2d innovation = Eigen::Vector2d(z.x, z.y) - H * x;
  const Eigen::Matrix2d S = H * P * H.transpose() + R;
  const Eigen::Matrix<double, 4, 2> K = P * H.transpose() * S.inverse();
  x += K * innovation;
  const Matrix4 I_KH = Matrix4::Identity() - K * H;
  P = I_KH * P * I_KH.transpose() + K * R * K.transpose();  // Joseph form
}

TrackEstimate estimate_of(const Track& t, const TrackerParams& params) {
  TrackEstimate e;
  e.track_id = t.id;
  e.x = t.state[0];
  e.y = t.state[1];
  e.vx = t.state[2];
  e.vy = t.state[3];
  e.box.center = {e.x, e.y};
  e.box.yaw = t.box_yaw;
  e.box.length = std::max(params.min_extent, t.box_length);
  e.box.width = std::max(params.min_extent, t.box_width);
  e.age = t.age;
  e.confirmed = t.confirmed;
  return e;
}

}  // namespace

std::pair<TrackerState, std::vector<TrackEstimate>> tracker_step(const TrackerState& state,
                                                                 std::span<const Cluster> clusters, double dt,
                                                                 const TrackerParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("tracker_step: dt must be > 0");
  TrackerState next = state;
  auto& tracks = next.tracks;
  for (auto& t : tracks) predict(t, dt, params);

  std::vector<int> track_to_cluster(tracks.size(), -1);
  std::vector<bool> cluster_used(clusters.size(), false);
  if (!tracks.empty() && !clusters.empty()) {
    constexpr double kForbidden = 1e9;
    CostMatrix cost(tracks.size(), clusters.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      for (std::size_t j = 0; j < clusters.size(); ++j) {
        const double d = (Vec2{tracks[i].state[0], tracks[i].state[1]} - clusters[j].centroid).norm();
        cost(i, j) = d <= params.gate ? d : kForbidden;
      }
    }
    const auto assignment = solve_assignment(cost);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      const int j = assignment.row_to_col[i];
      if (j >= 0 && cost(i, static_cast<std::size_t>(j)) <= params.gate) {
        track_to_cluster[i] = j;
        cluster_used[static_cast<std::size_t>(j)] = true;
      }
    }
  }

  const std::uint32_t window_mask = (1u << params.confirm_window) - 1u;
  std::vector<Track> survivors;
  survivors.reserve(tracks.size() + clusters.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    Track t = tracks[i];
    const bool hit = track_to_cluster[i] >= 0;
    if (hit) {
      const auto& cl = clusters[static_cast<std::size_t>(track_to_cluster[i])];
      correct(t, cl.centroid, params);
      update_shape(t, cl, params);
    }
    ++t.age;
    t.misses = hit ? 0 : t.misses + 1;
    t.hit_history = (t.hit_history << 1) | (hit ? 1u : 0u);
    if (!t.confirmed && std::popcount(t.hit_history & window_mask) >= params.confirm_hits) t.confirmed = true;

    if (t.confirmed && t.misses >= params.max_misses) continue;
    if (!t.confirmed && t.age >= params.confirm_window) continue;
    survivors.push_back(std::move(t));
  }
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    if (!cluster_used[j]) survivors.push_back(spawn(clusters[j], next.next_id++, params));
  }
  tracks = std::move(survivors);

  std::vector<TrackEstimate> out;
  for (const auto& t : tracks) {
    if (t.confirmed) out.push_back(estimate_of(t, params));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.track_id < b.track_id; });
  return {std::move(next), std::move(out)};
}

std::vector<std::vector<TrackEstimate>> run_perception(std::span<const PointCloud> clouds,
                                                       std::span<const Frame> frames, const SensorPose& sensor,
                                                       double dt, const PerceptionConfig& config) {
  if (clouds.empty()) throw std::invalid_argument("run_perception: no clouds");
  if (clouds.size() != frames.size()) throw std::invalid_argument("run_perception: clouds and frames differ in length");
  std::vector<std::vector<TrackEstimate>> out;
  out.reserve(clouds.size());
  TrackerState state;
  for (std::size_t k = 0; k < clouds.size(); ++k) {
    if (clouds[k].frame_index != frames[k].index) {
      throw std::invalid_argument("run_perception: cloud " + std::to_string(k) + " is not aligned with its frame");
    }
    const auto pose = sensor_world_pose(frames[k].ego, sensor);
    const auto clusters = cluster(clouds[k], pose, config.clustering);
    auto [next, estimates] = tracker_step(state, clusters, dt, config.tracker);
    state = std::move(next);
    out.push_back(std::move(estimates));
  }
  return out;
}

}  // namespace radargap
