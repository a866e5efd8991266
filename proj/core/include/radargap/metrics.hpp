#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radargap/geometry.hpp"
#include "radargap/perception.hpp"
#include "radargap/sensor_models.hpp"

namespace radargap {

/// Detection position plus weighted Doppler, the space the point-cloud distances live in.
struct MetricPoint3 {
  double x{0.0};
  double y{0.0};
  double d{0.0};

  bool operator==(const MetricPoint3&) const = default;
};

double distance(const MetricPoint3& a, const MetricPoint3& b);

std::vector<MetricPoint3> to_metric_points(const PointCloud& cloud, double doppler_weight = 1.0);

enum class MetricId {
  ospa,
  iou,
  rmse_x,
  rmse_y,
  cardinality_error,
  dpp,
  wd,
  pne,
  wd_range,
  wd_azimuth,
  wd_doppler,
};

inline constexpr std::array<MetricId, 11> kAllMetrics = {
    MetricId::ospa, MetricId::iou,  MetricId::rmse_x, MetricId::rmse_y,   MetricId::cardinality_error,
    MetricId::dpp,  MetricId::wd,   MetricId::pne,    MetricId::wd_range, MetricId::wd_azimuth,
    MetricId::wd_doppler};

enum class Direction { lower_is_better, higher_is_better };

struct MetricInfo {
  MetricId id;
  std::string_view name;  ///< stable identifier used in files
  int fidelity_level;     ///< 1..4
  Direction direction;
};

const MetricInfo& metric_info(MetricId id);
std::optional<MetricId> metric_from_name(std::string_view name);
/// "↓" for lower-is-better, "↑" otherwise.
std::string_view direction_arrow(Direction d);

struct MetricRecord {
  MetricId id{MetricId::dpp};
  std::vector<double> per_frame;  ///< frames that contributed, in frame order
  double scenario_mean{0.0};
  int flagged_frames{0};  ///< frames where one side was empty and a cap was charged

  bool operator==(const MetricRecord&) const = default;
};

// ---- explicit, high level ------------------------------------------------------------------

/// Mean over X of the distance to the nearest point of Y. Throws on empty input.
double dpp(std::span<const MetricPoint3> x, std::span<const MetricPoint3> y);

/// max(dpp(X, Y), dpp(Y, X)).
double dpp_worst(std::span<const MetricPoint3> x, std::span<const MetricPoint3> y);

/// Exact Earth Mover's Distance between uniform empirical distributions on X and Y with
/// Euclidean ground distance. Throws on empty input.
double wasserstein(std::span<const MetricPoint3> x, std::span<const MetricPoint3> y);

// ---- explicit, low level -------------------------------------------------------------------

/// 1-D Wasserstein-1 distance: the integral of |F_a - F_b|.
double wd_1d(std::span<const double> a, std::span<const double> b);

/// |M - N|.
double pne(std::size_t m, std::size_t n);

// ---- implicit ------------------------------------------------------------------------------

/// OSPA distance of order p with cutoff c. Both empty gives 0.
double ospa(std::span<const Vec2> a, std::span<const Vec2> b, double p = 2.0, double c = 5.0);

/// Gated optimal matching of two box sets on center distance.
struct BoxMatch {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  ///< (index in a, index in b)
  std::size_t unmatched_a{0};
  std::size_t unmatched_b{0};
};

BoxMatch match_on_center(std::span<const OrientedBox> a, std::span<const OrientedBox> b, double gate);

/// Mean IoU over matched pairs, with each unmatched box contributing 0.
/// Empty optional when neither side has a box.
std::optional<double> frame_iou(std::span<const OrientedBox> sim, std::span<const OrientedBox> ref, double gate);

enum class Axis { x, y };

/// Position pairs (simulated, reference) matched within one frame.
struct MatchedPair {
  Vec2 sim;
  Vec2 ref;
};

/// Root mean square per-axis error over all pairs. Throws when `pairs` is empty.
double rmse_axis(std::span<const MatchedPair> pairs, Axis axis);

/// Mean absolute per-frame count difference. Throws on length mismatch.
double cardinality_error(std::span<const std::size_t> sim_counts, std::span<const std::size_t> ref_counts);

// ---- scenario evaluation -------------------------------------------------------------------

struct MetricConfig {
  double doppler_weight{1.0};
  /// Charged for DPP, WD and WD_r when exactly one cloud of a frame is empty. Unset means
  /// the sensor range_max.
  std::optional<double> empty_cap;
  /// Charged for WD_phi in that case. Unset means the full azimuth span (2 * fov).
  std::optional<double> empty_cap_azimuth;
  double empty_cap_doppler{20.0};
  double ospa_p{2.0};
  double ospa_c{5.0};
  double match_gate{5.0};

  void validate() const;
};

/// Per-frame explicit metrics (FL III / FL IV) between reference and simulated clouds.
/// Frames where both clouds are empty are skipped.
std::vector<MetricRecord> explicit_metrics(std::span<const PointCloud> reference, std::span<const PointCloud> sim,
                                           const SensorPose& sensor, const MetricConfig& config);

/// Per-frame implicit metrics (FL I / FL II) between reference and simulated track lists.
std::vector<MetricRecord> implicit_metrics(std::span<const std::vector<TrackEstimate>> reference,
                                           std::span<const std::vector<TrackEstimate>> sim,
                                           const MetricConfig& config);

}  // namespace radargap
