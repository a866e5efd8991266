#include "radargap/gap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radargap {

namespace {

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += weights[i] * values[i];
    den += weights[i];
  }
  return num / den;
}

std::string metric_field(const char* field, MetricId id) {
  return std::string("gap.") + field + "." + std::string(metric_info(id).name);
}

}  // namespace

void GapConfig::validate() const {
  for (MetricId id : kAllMetrics) {
    const double w = metric_weights[metric_index(id)];
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument(metric_field("metric_weights", id) + " must be >= 0");
    if (mode == NormalizationMode::fixed) {
      const auto& r = fixed_ranges[metric_index(id)];
      if (!r) throw std::invalid_argument(metric_field("fixed_ranges", id) + " is required in fixed mode");
      if (!(r->max > r->min) || !std::isfinite(r->min) || !std::isfinite(r->max)) {
        throw std::invalid_argument(metric_field("fixed_ranges", id) + " needs finite min < max");
      }
    }
  }
  for (int level = 1; level <= 4; ++level) {
    double sum = 0.0;
    for (MetricId id : kAllMetrics) {
      if (metric_info(id).fidelity_level == level) sum += metric_weights[metric_index(id)];
    }
    if (!(sum > 0.0)) {
      throw std::invalid_argument("gap.metric_weights: fidelity level " + std::to_string(level) + " has zero total weight");
    }
  }
  double level_sum = 0.0;
  for (std::size_t i = 0; i < level_weights.size(); ++i) {
    if (!(level_weights[i] >= 0.0) || !std::isfinite(level_weights[i])) {
      throw std::invalid_argument("gap.level_weights[" + std::to_string(i) + "] must be >= 0");
    }
    level_sum += level_weights[i];
  }
  if (!(level_sum > 0.0)) throw std::invalid_argument("gap.level_weights must not all be zero");
}

NormalizedColumn normalize(std::span<const double> raw, MetricId id, const GapConfig& config) {
  for (double v : raw) {
    if (!std::isfinite(v)) throw std::invalid_argument("normalize: non-finite value for " + std::string(metric_info(id).name));
  }
  NormalizedColumn out;
  if (config.mode == NormalizationMode::fixed) {
    const auto& r = config.fixed_ranges[metric_index(id)];
    if (!r || !(r->max > r->min)) {
      throw std::invalid_argument(metric_field("fixed_ranges", id) + " is missing or empty");
    }
    out.range = *r;
  } else {
    if (raw.size() < 2) {
      throw std::invalid_argument("normalize: min-max normalization needs at least two models or fixed ranges");
    }
    const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
    out.range = {*lo, *hi};
  }
  const double span = out.range.max - out.range.min;
  const bool invert = metric_info(id).direction == Direction::higher_is_better;
  out.values.reserve(raw.size());
  for (double v : raw) {
    double n = span > 0.0 ? std::clamp((v - out.range.min) / span, 0.0, 1.0) : 0.0;
    if (invert && span > 0.0) n = 1.0 - n;
    out.values.push_back(n);
  }
  return out;
}

FidelityLevelScores aggregate_levels(const std::array<std::optional<double>, kMetricCount>& normalized,
                                     const GapConfig& config) {
  FidelityLevelScores scores;
  for (int level = 1; level <= 4; ++level) {
    std::vector<double> values, weights;
    for (MetricId id : kAllMetrics) {
      const auto& info = metric_info(id);
      if (info.fidelity_level != level) continue;
      const auto& v = normalized[metric_index(id)];
      if (!v) throw std::invalid_argument("aggregate_levels: missing value for " + std::string(info.name));
      values.push_back(*v);
      weights.push_back(config.metric_weights[metric_index(id)]);
    }
    scores.fl[static_cast<std::size_t>(level - 1)] = weighted_mean(values, weights);
  }
  return scores;
}

FidelityLevelScores aggregate_levels(const MetricArray& normalized, const GapConfig& config) {
  std::array<std::optional<double>, kMetricCount> values;
  for (std::size_t i = 0; i < kMetricCount; ++i) values[i] = normalized[i];
  return aggregate_levels(values, config);
}

double gap(const FidelityLevelScores& scores, const std::array<double, 4>& level_weights) {
  return weighted_mean(scores.fl, level_weights);
}

GapReport build_gap_report(const std::string& scenario, std::uint64_t seed, std::span<const ModelMetrics> models,
                           const GapConfig& config) {
  config.validate();
  GapReport report;
  report.scenario = scenario;
  report.seed = seed;
  report.mode = config.mode;
  report.models.resize(models.size());

  for (std::size_t m = 0; m < models.size(); ++m) {
    auto& out = report.models[m];
    out.model = models[m].model;
    std::array<bool, kMetricCount> seen{};
    for (const auto& rec : models[m].records) {
      const auto i = metric_index(rec.id);
      out.raw[i] = rec.scenario_mean;
      out.flagged_frames[i] = rec.flagged_frames;
      seen[i] = true;
    }
    for (MetricId id : kAllMetrics) {
      if (!seen[metric_index(id)]) {
        throw std::invalid_argument("build_gap_report: model '" + out.model + "' lacks metric " +
                                    std::string(metric_info(id).name));
      }
    }
  }

  for (MetricId id : kAllMetrics) {
    const auto i = metric_index(id);
    std::vector<double> column;
    for (const auto& mg : report.models) column.push_back(mg.raw[i]);
    const auto norm = normalize(column, id, config);
    report.normalization[i] = norm.range;
    for (std::size_t m = 0; m < report.models.size(); ++m) report.models[m].normalized[i] = norm.values[m];
  }
  for (auto& mg : report.models) {
    mg.levels = aggregate_levels(mg.normalized, config);
    mg.g = gap(mg.levels, config.level_weights);
  }
  return report;
}

}  // namespace radargap
