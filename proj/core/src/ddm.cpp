#include "radargap/ddm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace radargap {

namespace {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

constexpr double kRegularization = 1e-6;
constexpr double kLog2Pi = 1.8378770664093453;

Vector3 to_eigen(const Vec3& v) { return {v[0], v[1], v[2]}; }

Matrix3 to_eigen(const Mat3& m) {
  Matrix3 out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out(r, c) = m[3 * r + c];
  return out;
}

Vec3 from_eigen(const Vector3& v) { return {v(0), v(1), v(2)}; }

Mat3 from_eigen(const Matrix3& m) {
  Mat3 out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[3 * r + c] = m(r, c);
  return out;
}

Matrix3 regularize(Matrix3 cov) {
  cov = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix3> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < kRegularization) {
    cov += kRegularization * Matrix3::Identity();
  }
  return cov;
}

// Gaussian log density with a precomputed Cholesky factor.
struct ComponentEval {
  double log_weight;
  Vector3 mean;
  Eigen::LLT<Matrix3> llt;
  double log_norm;

  explicit ComponentEval(const GaussianComponent& c)
      : log_weight(std::log(std::max(c.weight, 1e-300))), mean(to_eigen(c.mean)), llt(to_eigen(c.covariance)) {
    const Matrix3 L = llt.matrixL();
    log_norm = -1.5 * kLog2Pi - L.diagonal().array().log().sum();
  }

  double log_pdf(const Vector3& x) const {
    const Vector3 z = llt.matrixL().solve(x - mean);
    return log_weight + log_norm - 0.5 * z.squaredNorm();
  }
};

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

using Samples = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// k-means++ seeding followed by a few Lloyd iterations.
std::vector<GaussianComponent> initialize(const Samples& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Vector3> centers;
  centers.push_back(x.row(static_cast<Eigen::Index>(uniform(rng) * static_cast<double>(n)) % n).transpose());
  Eigen::VectorXd d2(n);
  while (static_cast<int>(centers.size()) < k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, (x.row(i).transpose() - c).squaredNorm());
      d2(i) = best;
    }
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = uniform(rng) * total;
      for (; pick < n - 1; ++pick) {
        u -= d2(pick);
        if (u <= 0.0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(uniform(rng) * static_cast<double>(n)) % n;
    }
    centers.push_back(x.row(pick).transpose());
  }

  std::vector<int> label(n, 0);
  for (int iter = 0; iter < 10; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (x.row(i).transpose() - centers[c]).squaredNorm();
        if (d < best) {
          best = d;
          label[i] = c;
        }
      }
    }
    std::vector<Vector3> sum(k, Vector3::Zero());
    std::vector<int> cnt(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sum[label[i]] += x.row(i).transpose();
      ++cnt[label[i]];
    }
    for (int c = 0; c < k; ++c)
      if (cnt[c] > 0) centers[c] = sum[c] / cnt[c];
  }

  const Vector3 global_mean = x.colwise().mean().transpose();
  const Matrix3 global_cov =
      regularize((x.rowwise() - global_mean.transpose()).transpose() * (x.rowwise() - global_mean.transpose()) /
                 static_cast<double>(n));
  std::vector<GaussianComponent> comps(k);
  for (int c = 0; c < k; ++c) {
    comps[c].weight = 1.0 / k;
    comps[c].mean = from_eigen(centers[c]);
    comps[c].covariance = from_eigen(Matrix3(global_cov / std::max(1, k)));
  }
  return comps;
}

struct EmResult {
  std::vector<GaussianComponent> components;
  double log_likelihood;
};

EmResult run_em(const Samples& x, std::vector<GaussianComponent> comps, const GmmFitOptions& options) {
  const Eigen::Index n = x.rows();
  const int k = static_cast<int>(comps.size());
  Eigen::MatrixXd resp(n, k);
  double previous = -std::numeric_limits<double>::infinity();
  double ll = previous;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<ComponentEval> evals;
    evals.reserve(k);
    for (const auto& c : comps) evals.emplace_back(c);
    ll = 0.0;
    Eigen::VectorXd row(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector3 xi = x.row(i).transpose();
      for (int c = 0; c < k; ++c) row(c) = evals[c].log_pdf(xi);
      const double lse = log_sum_exp(row);
      ll += lse;
      resp.row(i) = (row.array() - lse).exp().matrix().transpose();
    }
    if (iter > 0 && std::abs(ll - previous) <= options.tolerance * std::max(1.0, std::abs(ll))) break;
    previous = ll;

    for (int c = 0; c < k; ++c) {
      const double nk = resp.col(c).sum();
      if (nk < 1e-10) {
        comps[c].weight = 1e-10;
        continue;
      }
      const Vector3 mean = (x.transpose() * resp.col(c)) / nk;
      const Samples centered = x.rowwise() - mean.transpose();
      const Matrix3 cov = (centered.transpose() * resp.col(c).asDiagonal() * centered) / nk;
      comps[c].weight = nk / static_cast<double>(n);
      comps[c].mean = from_eigen(mean);
      comps[c].covariance = from_eigen(regularize(cov));
    }
    const double wsum = std::accumulate(comps.begin(), comps.end(), 0.0,
                                        [](double s, const GaussianComponent& g) { return s + g.weight; });
    for (auto& c : comps) c.weight /= wsum;
  }
  return {std::move(comps), ll};
}

}  // namespace

Vec3 GaussianMixture::mean() const {
  Vector3 m = Vector3::Zero();
  for (const auto& c : components) m += c.weight * to_eigen(c.mean);
  return from_eigen(m);
}

Mat3 GaussianMixture::covariance() const {
  const Vector3 mu = to_eigen(mean());
  Matrix3 s = Matrix3::Zero();
  for (const auto& c : components) {
    const Vector3 d = to_eigen(c.mean) - mu;
    s += c.weight * (to_eigen(c.covariance) + d * d.transpose());
  }
  return from_eigen(s);
}

double GaussianMixture::log_density(const Vec3& x) const {
  Eigen::VectorXd terms(static_cast<Eigen::Index>(components.size()));
  for (std::size_t c = 0; c < components.size(); ++c) {
    terms(static_cast<Eigen::Index>(c)) = ComponentEval(components[c]).log_pdf(to_eigen(x));
  }
  return log_sum_exp(terms);
}

Vec3 GaussianMixture::sample(Rng& rng) const {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double u = uniform(rng);
  std::size_t pick = components.size() - 1;
  for (std::size_t c = 0; c < components.size(); ++c) {
    u -= components[c].weight;
    if (u < 0.0) {
      pick = c;
      break;
    }
  }
  const auto& comp = components[pick];
  const Vector3 z{gauss(rng), gauss(rng), gauss(rng)};
  const Eigen::LLT<Matrix3> llt(to_eigen(comp.covariance));
  return from_eigen(Vector3(to_eigen(comp.mean) + llt.matrixL() * z));
}

GaussianMixture fit_gaussian_mixture(std::span<const Vec3> samples, const GmmFitOptions& options) {
  if (samples.empty()) throw std::invalid_argument("fit_gaussian_mixture: no samples");
  if (options.max_components < 1) throw std::invalid_argument("fit_gaussian_mixture: max_components must be >= 1");
  const auto n = static_cast<Eigen::Index>(samples.size());
  Samples x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int d = 0; d < 3; ++d) x(i, d) = samples[static_cast<std::size_t>(i)][d];

  const int k_max = static_cast<int>(std::min<Eigen::Index>(options.max_components, n));
  GaussianMixture best;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) {
    Rng rng(derive_seed(options.seed, "gmm-k" + std::to_string(k)));
    auto em = run_em(x, initialize(x, k, rng), options);
    const double params = 10.0 * k - 1.0;
    const double bic = -2.0 * em.log_likelihood + params * std::log(static_cast<double>(n));
    if (bic < best_bic) {
      best_bic = bic;
      best.components = std::move(em.components);
    }
  }
  return best;
}

// -------------------------------------------------------------------------------------------

double SensorFrameTarget::aspect_angle() const { return wrap_angle(std::atan2(-center.y, -center.x) - yaw); }

SensorFrameTarget target_in_sensor_frame(const ObjectState& target, const ObjectState& ego, const SensorPose& sensor) {
  const auto pose = sensor_world_pose(ego, sensor);
  SensorFrameTarget t;
  t.center = pose.to_sensor(target.position());
  t.yaw = wrap_angle(target.yaw - pose.yaw);
  t.length = target.length;
  t.width = target.width;
  t.velocity = rotate(target.velocity() - pose.velocity, -pose.yaw);
  return t;
}

Detection ddm_detection(const SensorFrameTarget& target, const Vec3& offset) {
  const Vec2 p = target.center + rotate({offset[0], offset[1]}, target.yaw);
  const double r = p.norm();
  const double radial = r > 0.0 ? target.velocity.dot(p) / r : 0.0;
  return {r, std::atan2(p.y, p.x), radial + offset[2]};
}

Vec3 ddm_offset(const SensorFrameTarget& target, const Detection& detection) {
  const Vec2 p = detection_position(detection);
  const Vec2 local = rotate(p - target.center, -target.yaw);
  const double r = p.norm();
  const double radial = r > 0.0 ? target.velocity.dot(p) / r : 0.0;
  return {local.x, local.y, detection.doppler - radial};
}

int DdmModel::aspect_bin(double aspect) const {
  const double width = 2.0 * std::numbers::pi / aspect_bin_count;
  const int b = static_cast<int>(std::floor((wrap_angle(aspect) + std::numbers::pi) / width));
  return std::clamp(b, 0, aspect_bin_count - 1);
}

int DdmModel::range_bin(double range) const {
  const int bins = range_bin_count();
  const int b = static_cast<int>(std::floor(range / (range_max / bins)));
  return std::clamp(b, 0, bins - 1);
}

double DdmModel::mean_count(int bin) const {
  const auto& dist = count_distributions.at(static_cast<std::size_t>(bin));
  double m = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) m += static_cast<double>(k) * dist[k];
  return m;
}

void DdmModel::validate() const {
  if (static_cast<int>(aspect_mixtures.size()) != aspect_bin_count || aspect_bin_count < 1) {
    throw std::invalid_argument("ddm model: one mixture per aspect bin required");
  }
  if (count_distributions.empty()) throw std::invalid_argument("ddm model: no range bins");
  for (const auto& mix : aspect_mixtures) {
    if (mix.components.empty()) throw std::invalid_argument("ddm model: empty mixture");
    double w = 0.0;
    for (const auto& c : mix.components) {
      w += c.weight;
      const Matrix3 cov = to_eigen(c.covariance);
      if (!cov.isApprox(cov.transpose(), 1e-12) || Eigen::LLT<Matrix3>(cov).info() != Eigen::Success) {
        throw std::invalid_argument("ddm model: covariance not symmetric positive definite");
      }
    }
    if (std::abs(w - 1.0) > 1e-9) throw std::invalid_argument("ddm model: mixture weights do not sum to 1");
  }
  for (const auto& dist : count_distributions) {
    if (static_cast<int>(dist.size()) != max_count + 1) {
      throw std::invalid_argument("ddm model: count distribution support must be {0..max_count}");
    }
    const double s = std::accumulate(dist.begin(), dist.end(), 0.0);
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("ddm model: count distribution does not sum to 1");
  }
}

namespace {

// Index of the nearest populated bin; circular distance when `wrap` is set. Ties go low.
std::vector<int> nearest_populated(const std::vector<bool>& populated, bool wrap) {
  const int n = static_cast<int>(populated.size());
  std::vector<int> out(n, -1);
  for (int i = 0; i < n; ++i) {
    int best = -1;
    int best_d = std::numeric_limits<int>::max();
    for (int j = 0; j < n; ++j) {
      if (!populated[j]) continue;
      int d = std::abs(i - j);
      if (wrap) d = std::min(d, n - d);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    out[i] = best;
  }
  return out;
}

}  // namespace

DdmModel ddm_fit(std::span<const DdmTrainingSample> training, const DdmFitOptions& options) {
  if (training.empty()) throw std::invalid_argument("ddm_fit: empty training set");
  if (options.aspect_bins < 1 || options.range_bins < 1 || options.max_count < 0 || !(options.range_max > 0.0)) {
    throw std::invalid_argument("ddm_fit: invalid binning options");
  }

  DdmModel model;
  model.aspect_bin_count = options.aspect_bins;
  model.range_max = options.range_max;
  model.max_count = options.max_count;
  model.count_distributions.assign(options.range_bins, std::vector<double>(options.max_count + 1, 0.0));

  std::vector<std::vector<Vec3>> offsets(options.aspect_bins);
  std::vector<double> frames_per_range(options.range_bins, 0.0);

  for (const auto& sample : training) {
    const auto& t = sample.target;
    const int ab = model.aspect_bin(t.aspect_angle());
    const int rb = model.range_bin(t.center.norm());
    int count = 0;
    for (const auto& d : sample.cloud.detections) {
      const Vec3 off = ddm_offset(t, d);
      if (std::abs(off[0]) > 0.5 * t.length + options.association_gate ||
          std::abs(off[1]) > 0.5 * t.width + options.association_gate) {
        continue;
      }
      offsets[ab].push_back(off);
      ++count;
    }
    model.count_distributions[rb][std::min(count, options.max_count)] += 1.0;
    frames_per_range[rb] += 1.0;
  }

  std::vector<bool> has_range(options.range_bins);
  for (int b = 0; b < options.range_bins; ++b) has_range[b] = frames_per_range[b] > 0.0;
  const auto range_src = nearest_populated(has_range, false);
  for (int b = 0; b < options.range_bins; ++b) {
    if (has_range[b]) {
      for (auto& p : model.count_distributions[b]) p /= frames_per_range[b];
    }
  }
  for (int b = 0; b < options.range_bins; ++b) {
    if (!has_range[b]) model.count_distributions[b] = model.count_distributions[range_src[b]];
  }

  std::vector<bool> has_aspect(options.aspect_bins);
  for (int b = 0; b < options.aspect_bins; ++b) has_aspect[b] = !offsets[b].empty();
  model.aspect_mixtures.resize(options.aspect_bins);
  for (int b = 0; b < options.aspect_bins; ++b) {
    if (!has_aspect[b]) continue;
    GmmFitOptions gmm = options.gmm;
    gmm.seed = derive_seed(options.gmm.seed, "aspect-" + std::to_string(b));
    model.aspect_mixtures[b] = fit_gaussian_mixture(offsets[b], gmm);
  }
  if (std::none_of(has_aspect.begin(), has_aspect.end(), [](bool v) { return v; })) {
    // No detections at all: a broad blob at the target center keeps the model well-formed.
    GaussianComponent c;
    c.covariance = {1.0, 0, 0, 0, 0.25, 0, 0, 0, 0.01};
    for (auto& mix : model.aspect_mixtures) mix.components = {c};
  } else {
    const auto aspect_src = nearest_populated(has_aspect, true);
    for (int b = 0; b < options.aspect_bins; ++b) {
      if (!has_aspect[b]) model.aspect_mixtures[b] = model.aspect_mixtures[aspect_src[b]];
    }
  }
  return model;
}

PointCloud ddm_sample(const Frame& frame, const SensorPose& sensor, const DdmModel& model, Rng& rng) {
  const auto pose = sensor_world_pose(frame.ego, sensor);
  const auto vis = frame_visibility(frame, sensor);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  PointCloud cloud{frame.index, frame.timestamp, {}};
  for (std::size_t i = 0; i < frame.targets.size(); ++i) {
    if (vis[i] <= 0.0) continue;
    const auto t = target_in_sensor_frame(frame.targets[i], frame.ego, sensor);
    const auto& dist = model.count_distributions[static_cast<std::size_t>(model.range_bin(t.center.norm()))];
    double u = uniform(rng);
    int k = static_cast<int>(dist.size()) - 1;
    for (std::size_t c = 0; c < dist.size(); ++c) {
      u -= dist[c];
      if (u < 0.0) {
        k = static_cast<int>(c);
        break;
      }
    }
    const auto& mix = model.aspect_mixtures[static_cast<std::size_t>(model.aspect_bin(t.aspect_angle()))];
    for (int j = 0; j < k; ++j) {
      const Detection d = ddm_detection(t, mix.sample(rng));
      if (pose.in_fov(d.range, d.azimuth)) cloud.detections.push_back(d);
    }
  }
  return cloud;
}

std::vector<DdmTrainingSample> collect_ddm_training(std::span<const Scenario> scenarios, const RtmParams& rtm,
                                                    const ReferenceNoise& noise, std::uint64_t seed) {
  std::vector<DdmTrainingSample> out;
  for (const auto& sc : scenarios) {
    Rng rng(derive_seed(seed, sc.name));
    for (const auto& frame : sc.frames) {
      if (frame.targets.size() != 1) {
        throw std::invalid_argument("collect_ddm_training: training frames must hold exactly one target");
      }
      if (visibility(frame.targets.front(), {}, frame.ego, sc.sensor) <= 0.0) continue;
      out.push_back({target_in_sensor_frame(frame.targets.front(), frame.ego, sc.sensor),
                     reference_detect(frame, sc.sensor, rtm, noise, rng)});
    }
  }
  return out;
}

}  // namespace radargap
