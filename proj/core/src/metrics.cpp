#include "radargap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "radargap/assignment.hpp"
#include "radargap/transport.hpp"

namespace radargap {

namespace {

constexpr std::array<MetricInfo, 11> kRegistry = {{
    {MetricId::ospa, "OSPA", 1, Direction::lower_is_better},
    {MetricId::iou, "IoU", 1, Direction::higher_is_better},
    {MetricId::rmse_x, "RMSE_x", 2, Direction::lower_is_better},
    {MetricId::rmse_y, "RMSE_y", 2, Direction::lower_is_better},
    {MetricId::cardinality_error, "CardinalityError", 2, Direction::lower_is_better},
    {MetricId::dpp, "DPP", 3, Direction::lower_is_better},
    {MetricId::wd, "WD", 3, Direction::lower_is_better},
    {MetricId::pne, "PNE", 4, Direction::lower_is_better},
    {MetricId::wd_range, "WD_r", 4, Direction::lower_is_better},
    {MetricId::wd_azimuth, "WD_phi", 4, Direction::lower_is_better},
    {MetricId::wd_doppler, "WD_doppler", 4, Direction::lower_is_better},
}};

void require_non_empty(std::size_t m, std::size_t n, const char* what) {
  if (m == 0 || n == 0) throw std::invalid_argument(std::string(what) + ": undefined for an empty point set");
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

const MetricInfo& metric_info(MetricId id) { return kRegistry[static_cast<std::size_t>(id)]; }

std::optional<MetricId> metric_from_name(std::string_view name) {
  for (const auto& info : kRegistry) {
    if (info.name == name) return info.id;
  }
  return std::nullopt;
}

std::string_view direction_arrow(Direction d) { return d == Direction::lower_is_better ? "↓" : "↑"; }

double distance(const MetricPoint3& a, const MetricPoint3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dd = a.d - b.d;
  return std::sqrt(dx * dx + dy * dy + dd * dd);
}

std::vector<MetricPoint3> to_metric_points(const PointCloud& cloud, double doppler_weight) {
  std::vector<MetricPoint3> out;
  out.reserve(cloud.detections.size());
  for (const auto& d : cloud.detections) {
    const Vec2 p = detection_position(d);
    out.push_back({p.x, p.y, d.doppler * doppler_weight});
  }
  return out;
}

double dpp(std::span<const MetricPoint3> x, std::span<const MetricPoint3> y) {
  require_non_empty(x.size(), y.size(), "dpp");
  double sum = 0.0;
  for (const auto& a : x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : y) best = std::min(best, distance(a, b));
    sum += best;
  }
  return sum / static_cast<double>(x.size());
}

double dpp_worst(std::span<const MetricPoint3> x, std::span<const MetricPoint3> y) {
  return std::max(dpp(x, y), dpp(y, x));
}

double wasserstein(std::span<const MetricPoint3> x, std::span<const MetricPoint3> y) {
  require_non_empty(x.size(), y.size(), "wasserstein");
  CostMatrix ground(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) ground(i, j) = distance(x[i], y[j]);
  return emd_uniform(ground);
}

double wd_1d(std::span<const double> a, std::span<const double> b) {
  require_non_empty(a.size(), b.size(), "wd_1d");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());

  // Sweep the merged breakpoints; between consecutive breakpoints both CDFs are constant.
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(sa.front(), sb.front());
  double total = 0.0;
  while (i < sa.size() || j < sb.size()) {
    const double next = (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) ? sa[i] : sb[j];
    total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (next - prev);
    while (i < sa.size() && sa[i] == next) ++i;
    while (j < sb.size() && sb[j] == next) ++j;
    prev = next;
  }
  return total;
}

double pne(std::size_t m, std::size_t n) { return std::abs(static_cast<double>(m) - static_cast<double>(n)); }

double ospa(std::span<const Vec2> a, std::span<const Vec2> b, double p, double c) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("ospa: order p must be >= 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("ospa: cutoff c must be > 0");
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  if (n == 0) return 0.0;

  double localisation = 0.0;
  if (m > 0) {
    CostMatrix cost(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) cost(i, j) = std::pow(std::min(c, (a[i] - b[j]).norm()), p);
    localisation = solve_assignment(cost).cost;
  }
  const double cardinality = std::pow(c, p) * static_cast<double>(n - m);
  return std::min(c, std::pow((localisation + cardinality) / static_cast<double>(n), 1.0 / p));
}

BoxMatch match_on_center(std::span<const OrientedBox> a, std::span<const OrientedBox> b, double gate) {
  BoxMatch out;
  if (!a.empty() && !b.empty()) {
    constexpr double kForbidden = 1e9;
    CostMatrix cost(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        const double d = (a[i].center - b[j].center).norm();
        cost(i, j) = d <= gate ? d : kForbidden;
      }
    }
    const auto assignment = solve_assignment(cost);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const int j = assignment.row_to_col[i];
      if (j >= 0 && cost(i, static_cast<std::size_t>(j)) <= gate) out.pairs.emplace_back(i, static_cast<std::size_t>(j));
    }
  }
  out.unmatched_a = a.size() - out.pairs.size();
  out.unmatched_b = b.size() - out.pairs.size();
  return out;
}

std::optional<double> frame_iou(std::span<const OrientedBox> sim, std::span<const OrientedBox> ref, double gate) {
  if (sim.empty() && ref.empty()) return std::nullopt;
  const auto match = match_on_center(sim, ref, gate);
  double sum = 0.0;
  for (const auto& [i, j] : match.pairs) sum += box_iou(sim[i], ref[j]);
  const auto denominator = match.pairs.size() + match.unmatched_a + match.unmatched_b;
  return sum / static_cast<double>(denominator);
}

double rmse_axis(std::span<const MatchedPair> pairs, Axis axis) {
  if (pairs.empty()) throw std::invalid_argument("rmse_axis: no matched pairs");
  double sum = 0.0;
  for (const auto& p : pairs) {
    const double e = axis == Axis::x ? p.sim.x - p.ref.x : p.sim.y - p.ref.y;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

double cardinality_error(std::span<const std::size_t> sim_counts, std::span<const std::size_t> ref_counts) {
  if (sim_counts.size() != ref_counts.size()) throw std::invalid_argument("cardinality_error: frame count mismatch");
  if (sim_counts.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < sim_counts.size(); ++k) sum += pne(sim_counts[k], ref_counts[k]);
  return sum / static_cast<double>(sim_counts.size());
}

void MetricConfig::validate() const {
  if (!(doppler_weight >= 0.0)) throw std::invalid_argument("metrics.doppler_weight must be >= 0");
  if (empty_cap && !(*empty_cap > 0.0)) throw std::invalid_argument("metrics.empty_cap must be > 0");
  if (empty_cap_azimuth && !(*empty_cap_azimuth > 0.0)) {
    throw std::invalid_argument("metrics.empty_cap_azimuth must be > 0");
  }
  if (!(empty_cap_doppler > 0.0)) throw std::invalid_argument("metrics.empty_cap_doppler must be > 0");
  if (!(ospa_p >= 1.0)) throw std::invalid_argument("metrics.ospa_p must be >= 1");
  if (!(ospa_c > 0.0)) throw std::invalid_argument("metrics.ospa_c must be > 0");
  if (!(match_gate > 0.0)) throw std::invalid_argument("metrics.match_gate must be > 0");
}

std::vector<MetricRecord> explicit_metrics(std::span<const PointCloud> reference, std::span<const PointCloud> sim,
                                           const SensorPose& sensor, const MetricConfig& config) {
  config.validate();
  if (reference.size() != sim.size()) throw std::invalid_argument("explicit_metrics: sequences differ in length");
  const double cap = config.empty_cap.value_or(sensor.range_max);
  const double cap_phi = config.empty_cap_azimuth.value_or(2.0 * sensor.fov_azimuth);
  const double cap_dop = config.empty_cap_doppler;

  MetricRecord rdpp{MetricId::dpp, {}, 0.0, 0};
  MetricRecord rwd{MetricId::wd, {}, 0.0, 0};
  MetricRecord rpne{MetricId::pne, {}, 0.0, 0};
  MetricRecord rr{MetricId::wd_range, {}, 0.0, 0};
  MetricRecord rphi{MetricId::wd_azimuth, {}, 0.0, 0};
  MetricRecord rdop{MetricId::wd_doppler, {}, 0.0, 0};

  std::vector<double> fa, fb;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const auto& ref = reference[k];
    const auto& s = sim[k];
    if (ref.frame_index != s.frame_index) throw std::invalid_argument("explicit_metrics: frame misalignment");
    const std::size_t m = ref.detections.size();
    const std::size_t n = s.detections.size();
    rpne.per_frame.push_back(pne(m, n));
    if (m == 0 && n == 0) continue;
    if (m == 0 || n == 0) {
      rdpp.per_frame.push_back(cap);
      rwd.per_frame.push_back(cap);
      rr.per_frame.push_back(cap);
      rphi.per_frame.push_back(cap_phi);
      rdop.per_frame.push_back(cap_dop);
      for (auto* r : {&rdpp, &rwd, &rr, &rphi, &rdop}) ++r->flagged_frames;
      continue;
    }
    const auto x = to_metric_points(ref, config.doppler_weight);
    const auto y = to_metric_points(s, config.doppler_weight);
    rdpp.per_frame.push_back(dpp_worst(x, y));
    rwd.per_frame.push_back(wasserstein(x, y));

    auto feature = [&](auto get) {
      fa.clear();
      fb.clear();
      for (const auto& d : ref.detections) fa.push_back(get(d));
      for (const auto& d : s.detections) fb.push_back(get(d));
      return wd_1d(fa, fb);
    };
    rr.per_frame.push_back(feature([](const Detection& d) { return d.range; }));
    rphi.per_frame.push_back(feature([](const Detection& d) { return d.azimuth; }));
    rdop.per_frame.push_back(feature([](const Detection& d) { return d.doppler; }));
  }

  std::vector<MetricRecord> out{rdpp, rwd, rpne, rr, rphi, rdop};
  for (auto& r : out) r.scenario_mean = mean_of(r.per_frame);
  return out;
}

std::vector<MetricRecord> implicit_metrics(std::span<const std::vector<TrackEstimate>> reference,
                                           std::span<const std::vector<TrackEstimate>> sim,
                                           const MetricConfig& config) {
  config.validate();
  if (reference.size() != sim.size()) throw std::invalid_argument("implicit_metrics: sequences differ in length");

  MetricRecord rospa{MetricId::ospa, {}, 0.0, 0};
  MetricRecord riou{MetricId::iou, {}, 0.0, 0};
  MetricRecord rx{MetricId::rmse_x, {}, 0.0, 0};
  MetricRecord ry{MetricId::rmse_y, {}, 0.0, 0};
  MetricRecord rcard{MetricId::cardinality_error, {}, 0.0, 0};

  std::vector<MatchedPair> all_pairs;
  std::vector<std::size_t> sim_counts, ref_counts;
  int frames_with_boxes = 0;
  std::vector<Vec2> pa, pb;
  std::vector<OrientedBox> ba, bb;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    pa.clear();
    pb.clear();
    ba.clear();
    bb.clear();
    for (const auto& t : sim[k]) {
      pa.push_back({t.x, t.y});
      ba.push_back(t.box);
    }
    for (const auto& t : reference[k]) {
      pb.push_back({t.x, t.y});
      bb.push_back(t.box);
    }
    rospa.per_frame.push_back(ospa(pa, pb, config.ospa_p, config.ospa_c));
    if (const auto v = frame_iou(ba, bb, config.match_gate)) riou.per_frame.push_back(*v);
    sim_counts.push_back(pa.size());
    ref_counts.push_back(pb.size());
    rcard.per_frame.push_back(pne(pa.size(), pb.size()));

    if (!ba.empty() || !bb.empty()) ++frames_with_boxes;
    const auto match = match_on_center(ba, bb, config.match_gate);
    double sx = 0.0, sy = 0.0;
    for (const auto& [i, j] : match.pairs) {
      all_pairs.push_back({pa[i], pb[j]});
      sx += (pa[i].x - pb[j].x) * (pa[i].x - pb[j].x);
      sy += (pa[i].y - pb[j].y) * (pa[i].y - pb[j].y);
    }
    if (!match.pairs.empty()) {
      rx.per_frame.push_back(std::sqrt(sx / static_cast<double>(match.pairs.size())));
      ry.per_frame.push_back(std::sqrt(sy / static_cast<double>(match.pairs.size())));
    }
  }

  rospa.scenario_mean = mean_of(rospa.per_frame);
  // No box on either side in any frame: both agree perfectly.
  riou.scenario_mean = riou.per_frame.empty() ? 1.0 : mean_of(riou.per_frame);
  rcard.scenario_mean = cardinality_error(sim_counts, ref_counts);
  if (!all_pairs.empty()) {
    rx.scenario_mean = rmse_axis(all_pairs, Axis::x);
    ry.scenario_mean = rmse_axis(all_pairs, Axis::y);
  } else if (frames_with_boxes > 0) {
    rx.scenario_mean = ry.scenario_mean = config.match_gate;
    rx.flagged_frames = ry.flagged_frames = frames_with_boxes;
  }
  return {rospa, riou, rx, ry, rcard};
}

}  // namespace radargap
