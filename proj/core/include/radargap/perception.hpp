#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "radargap/geometry.hpp"
#include "radargap/scenario.hpp"
#include "radargap/sensor_models.hpp"

namespace radargap {

struct ClusterPoint {
  Vec2 position;  ///< world frame
  double doppler{0.0};

  bool operator==(const ClusterPoint&) const = default;
};

struct Cluster {
  std::vector<ClusterPoint> points;
  Vec2 centroid;
  double mean_doppler{0.0};

  bool operator==(const Cluster&) const = default;
};

struct ClusteringParams {
  double eps{2.5};            ///< neighbourhood radius, m
  int min_pts{2};             ///< neighbours (self included) for a core point
  double doppler_scale{1.0};  ///< metres per m/s in the clustering distance
};

/// DBSCAN over (x, y, doppler * doppler_scale) in the world frame. Detections are put in a
/// canonical order first, so the result does not depend on the input order. Noise points
/// are dropped; clusters come back sorted by centroid.
std::vector<Cluster> cluster(const PointCloud& cloud, const SensorWorldPose& pose, const ClusteringParams& params);

struct TrackEstimate {
  int track_id{0};
  double x{0.0};
  double y{0.0};
  double vx{0.0};
  double vy{0.0};
  OrientedBox box;
  int age{0};  ///< frames since birth, 1 on the birth frame
  bool confirmed{false};

  bool operator==(const TrackEstimate&) const = default;
};

struct TrackerParams {
  double gate{3.0};  ///< association distance, m
  int confirm_hits{2};
  int confirm_window{3};
  int max_misses{5};
  double process_accel_sigma{2.0};  ///< white-acceleration noise, m/s^2
  double measurement_sigma{0.5};    ///< centroid noise, m
  double initial_speed_sigma{10.0};
  double shape_smoothing{0.3};  ///< weight of the newest extent measurement
  double min_extent{0.5};
};

struct Track {
  int id{0};
  std::array<double, 4> state{};        ///< x, y, vx, vy
  std::array<double, 16> covariance{};  ///< row-major 4x4
  int age{0};
  int misses{0};
  std::uint32_t hit_history{0};  ///< bit k set when the track was hit k frames ago
  bool confirmed{false};
  double box_yaw{0.0};
  double box_length{0.0};
  double box_width{0.0};
  bool has_shape{false};

  bool operator==(const Track&) const = default;
};

struct TrackerState {
  std::vector<Track> tracks;
  int next_id{1};

  bool operator==(const TrackerState&) const = default;
};

/// One tracker cycle: constant-velocity prediction, gated global-nearest-neighbour
/// association on centroids, Kalman update, M-of-N confirmation and deletion after
/// `max_misses` consecutive misses. Returns the confirmed tracks sorted by id.
std::pair<TrackerState, std::vector<TrackEstimate>> tracker_step(const TrackerState& state,
                                                                 std::span<const Cluster> clusters, double dt,
                                                                 const TrackerParams& params);

struct PerceptionConfig {
  ClusteringParams clustering;
  TrackerParams tracker;
};

/// Runs clustering and tracking over a frame-aligned cloud sequence.
/// Throws std::invalid_argument when clouds and frames do not line up.
std::vector<std::vector<TrackEstimate>> run_perception(std::span<const PointCloud> clouds,
                                                       std::span<const Frame> frames, const SensorPose& sensor,
                                                       double dt, const PerceptionConfig& config);

}  // namespace radargap
