#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "radargap/rng.hpp"
#include "radargap/scenario.hpp"
#include "radargap/sensor_models.hpp"

namespace radargap {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;  ///< row-major

struct GaussianComponent {
  double weight{1.0};
  Vec3 mean{};
  Mat3 covariance{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

/// Mixture over (body-frame longitudinal offset, body-frame lateral offset, Doppler residual).
struct GaussianMixture {
  std::vector<GaussianComponent> components;

  [[nodiscard]] Vec3 mean() const;
  [[nodiscard]] Mat3 covariance() const;
  [[nodiscard]] double log_density(const Vec3& x) const;
  [[nodiscard]] Vec3 sample(Rng& rng) const;
};

struct GmmFitOptions {
  int max_components{5};
  int max_iterations{300};
  double tolerance{1e-7};  ///< relative log-likelihood change
  std::uint64_t seed{0};
};

/// EM fit for each component count in [1, max_components] (capped by the sample count);
/// the count with the lowest BIC wins. Near-singular covariances get 1e-6 I added.
GaussianMixture fit_gaussian_mixture(std::span<const Vec3> samples, const GmmFitOptions& options);

/// Target pose and relative velocity expressed in the sensor frame (sensor at the origin,
/// boresight along +x).
struct SensorFrameTarget {
  Vec2 center;
  double yaw{0.0};
  double length{4.5};
  double width{1.8};
  Vec2 velocity;  ///< relative to the sensor

  /// Angle of the line of sight to the sensor in the target body frame, (-pi, pi].
  [[nodiscard]] double aspect_angle() const;
};

SensorFrameTarget target_in_sensor_frame(const ObjectState& target, const ObjectState& ego,
                                         const SensorPose& sensor);

struct DdmTrainingSample {
  SensorFrameTarget target;
  PointCloud cloud;
};

struct DdmModel {
  int aspect_bin_count{8};
  double range_max{100.0};
  int max_count{40};
  std::vector<GaussianMixture> aspect_mixtures;          ///< one per aspect bin
  std::vector<std::vector<double>> count_distributions;  ///< per range bin over {0..max_count}

  [[nodiscard]] int range_bin_count() const { return static_cast<int>(count_distributions.size()); }
  [[nodiscard]] int aspect_bin(double aspect) const;
  [[nodiscard]] int range_bin(double range) const;
  [[nodiscard]] double mean_count(int range_bin) const;

  /// Throws std::invalid_argument when weights or count distributions do not sum to 1.
  void validate() const;
};

struct DdmFitOptions {
  int aspect_bins{8};
  int range_bins{10};
  double range_max{100.0};
  int max_count{40};
  /// Detections farther than this from the target rectangle are not attributed to it.
  double association_gate{2.0};
  GmmFitOptions gmm{};
};

/// Fits per-aspect-bin mixtures and per-range-bin detection count distributions.
/// Bins without data inherit the nearest populated bin (circular distance for aspect).
DdmModel ddm_fit(std::span<const DdmTrainingSample> training, const DdmFitOptions& options);

/// Samples detections for every visible target: a count from the range-conditioned
/// distribution, then that many offsets from the aspect-conditioned mixture. Draws that
/// fall outside the coverage cone are dropped.
PointCloud ddm_sample(const Frame& frame, const SensorPose& sensor, const DdmModel& model, Rng& rng);

/// Turns one target's sensor-frame pose and a mixture draw into a detection.
Detection ddm_detection(const SensorFrameTarget& target, const Vec3& offset);

/// Inverse of `ddm_detection`: body-frame offset and Doppler residual of a detection.
Vec3 ddm_offset(const SensorFrameTarget& target, const Detection& detection);

/// Collects single-target training pairs by running the reference sensor over `scenarios`.
std::vector<DdmTrainingSample> collect_ddm_training(std::span<const Scenario> scenarios, const RtmParams& rtm,
                                                    const ReferenceNoise& noise, std::uint64_t seed);

}  // namespace radargap
