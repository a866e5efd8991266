#pragma once

#include <utility>
#include <vector>

#include "radargap/rng.hpp"
#include "radargap/scenario.hpp"

namespace radargap {

/// One radar return in the sensor frame.
struct Detection {
  double range{0.0};    ///< m
  double azimuth{0.0};  ///< rad from boresight
  double doppler{0.0};  ///< radial velocity, m/s, negative when closing

  bool operator==(const Detection&) const = default;
};

struct PointCloud {
  int frame_index{0};
  double timestamp{0.0};
  std::vector<Detection> detections;

  bool operator==(const PointCloud&) const = default;
};

/// Cartesian position of a detection in the sensor frame.
inline Vec2 detection_position(const Detection& d) { return heading(d.azimuth) * d.range; }

/// Range, azimuth, Doppler of a world point attached to `object` (rigid translation only).
Detection detect_point(Vec2 world_point, const ObjectState& object, const SensorWorldPose& pose);

// -------------------------------------------------------------------------------------------
// Ideal radar model

/// Scattering centers spread evenly over the full perimeter of every visible target.
/// Targets with zero visibility produce nothing; perimeter points outside the coverage
/// cone are clipped so every emitted detection stays inside the field of view.
PointCloud irm_detect(const Frame& frame, const SensorPose& sensor, int points_per_object);

// -------------------------------------------------------------------------------------------
// Ray-casting model

/// Piecewise-linear map from SNR (dB) to detection probability, clamped at the ends.
struct DetectionCurve {
  std::vector<std::pair<double, double>> points;  ///< (snr_db, p), snr strictly increasing

  [[nodiscard]] double operator()(double snr_db) const;
  /// Linear ramp from 0 at `threshold_db` to 1 at `threshold_db + width_db`.
  static DetectionCurve ramp(double threshold_db, double width_db);
};

struct RtmParams {
  int ray_count{121};
  double tx_power_term{1.0};  ///< W
  double gain_term{1000.0};   ///< linear antenna gain (30 dBi)
  double wavelength{3.9e-3};  ///< m, 77 GHz
  double noise_power{1.5e-11};
  double snr_threshold{10.0};  ///< dB
  DetectionCurve detection_probability_curve{DetectionCurve::ramp(10.0, 10.0)};
  double rcs_per_unit_length{2.0};  ///< m^2 per m of illuminated edge

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Radar-equation SNR in dB for a reflector of cross-section `rcs` at `range`.
double rtm_snr_db(const RtmParams& params, double range, double rcs);

/// Ray-casting detections. One uniform draw is consumed per ray that hits a target, so two
/// runs with the same stream stay aligned regardless of thresholds.
PointCloud rtm_detect(const Frame& frame, const SensorPose& sensor, const RtmParams& params, Rng& rng);

// -------------------------------------------------------------------------------------------
// Pseudo-real reference sensor

struct ReferenceNoise {
  double sigma_range{0.15};
  double sigma_azimuth{deg_to_rad(0.5)};
  double sigma_doppler{0.1};
  double dropout{0.1};       ///< per-detection drop probability, in [0, 1)
  double clutter_rate{1.0};  ///< Poisson mean of clutter points per frame

  void validate() const;
};

/// Ray-casting output perturbed by Gaussian measurement noise, random dropouts and Poisson
/// clutter spread uniformly over the coverage cone. Clutter carries the Doppler of a
/// stationary reflector. Perturbed detections leaving the field of view are dropped.
PointCloud reference_detect(const Frame& frame, const SensorPose& sensor, const RtmParams& params,
                            const ReferenceNoise& noise, Rng& rng);

/// Adds isotropic Cartesian position noise to every detection; detections pushed out of
/// coverage are dropped. Used to build perturbed copies of a cloud.
PointCloud jitter_positions(const PointCloud& cloud, const SensorPose& sensor, double sigma, Rng& rng);

/// True when every detection satisfies the coverage invariants of `sensor`.
bool detections_in_fov(const PointCloud& cloud, const SensorPose& sensor);

}  // namespace radargap
