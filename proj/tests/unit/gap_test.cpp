#include <gtest/gtest.h>

#include <random>

#include "radargap/gap.hpp"

using namespace radargap;

namespace {

std::vector<MetricRecord> records_with(double value, double iou) {
  std::vector<MetricRecord> out;
  for (MetricId id : kAllMetrics) out.push_back({id, {}, id == MetricId::iou ? iou : value, 0});
  return out;
}

GapConfig fixed_unit_ranges() {
  GapConfig c;
  c.mode = NormalizationMode::fixed;
  for (auto& r : c.fixed_ranges) r = NormalizationRange{0.0, 1.0};
  return c;
}

}  // namespace

TEST(Normalize, MinMaxOnAnOspaColumn) {
  const std::vector<double> raw{0.342, 0.314, 0.304};
  const auto n = normalize(raw, MetricId::ospa, GapConfig{});
  EXPECT_DOUBLE_EQ(n.values[0], 1.0);
  EXPECT_NEAR(n.values[1], (0.314 - 0.304) / (0.342 - 0.304), 1e-12);
  EXPECT_NEAR(n.values[1], 0.263157894736842, 1e-12);
  EXPECT_DOUBLE_EQ(n.values[2], 0.0);
  EXPECT_EQ(n.range, (NormalizationRange{0.304, 0.342}));
}

TEST(Normalize, ConstantColumnIsAllZero) {
  const std::vector<double> raw{2.5, 2.5, 2.5};
  for (double v : normalize(raw, MetricId::wd, GapConfig{}).values) EXPECT_EQ(v, 0.0);
  const std::vector<double> ious{0.7, 0.7};
  for (double v : normalize(ious, MetricId::iou, GapConfig{}).values) EXPECT_EQ(v, 0.0);
}

TEST(Normalize, HigherIsBetterMetricsAreInverted) {
  const std::vector<double> raw{1.0, 0.0};
  const auto n = normalize(raw, MetricId::iou, GapConfig{});
  EXPECT_EQ(n.values, (std::vector<double>{0.0, 1.0}));
}

TEST(Normalize, NeedsAComparisonSetOrFixedRanges) {
  const std::vector<double> raw{0.4};
  EXPECT_THROW(normalize(raw, MetricId::dpp, GapConfig{}), std::invalid_argument);
  const auto n = normalize(std::vector<double>{0.4, 3.0}, MetricId::dpp, fixed_unit_ranges());
  EXPECT_EQ(n.values, (std::vector<double>{0.4, 1.0}));  // clamped to the fixed range
  EXPECT_EQ(normalize(raw, MetricId::dpp, fixed_unit_ranges()).values, (std::vector<double>{0.4}));
}

TEST(Normalize, PreservesTheRanking) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> raw(2 + trial % 5);
    for (auto& v : raw) v = u(rng);
    for (MetricId id : {MetricId::wd, MetricId::iou}) {
      const auto n = normalize(raw, id, GapConfig{}).values;
      for (std::size_t i = 0; i < raw.size(); ++i) {
        for (std::size_t j = 0; j < raw.size(); ++j) {
          if (raw[i] < raw[j]) {
            // 0 is best: lower raw is better for WD, higher raw is better for IoU.
            if (id == MetricId::wd) {
              EXPECT_LE(n[i], n[j]);
            } else {
              EXPECT_GE(n[i], n[j]);
            }
          }
        }
      }
      for (double v : n) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Aggregate, LevelMeansAndWeights) {
  MetricArray normalized{};
  EXPECT_EQ(aggregate_levels(normalized, GapConfig{}).fl, (std::array<double, 4>{0, 0, 0, 0}));

  normalized[metric_index(MetricId::dpp)] = 0.4;
  normalized[metric_index(MetricId::wd)] = 0.2;
  EXPECT_NEAR(aggregate_levels(normalized, GapConfig{}).fl[2], 0.3, 1e-15);

  GapConfig weighted;
  weighted.metric_weights[metric_index(MetricId::dpp)] = 0.75;
  weighted.metric_weights[metric_index(MetricId::wd)] = 0.25;
  EXPECT_NEAR(aggregate_levels(normalized, weighted).fl[2], 0.35, 1e-15);
}

TEST(Aggregate, MissingMetricIsAnError) {
  std::array<std::optional<double>, kMetricCount> values;
  for (auto& v : values) v = 0.5;
  values[metric_index(MetricId::wd_azimuth)].reset();
  EXPECT_THROW(aggregate_levels(values, GapConfig{}), std::invalid_argument);
}

TEST(Gap, IsTheMeanOfTheLevels) {
  EXPECT_EQ(gap({{0, 0, 0, 0}}), 0.0);
  EXPECT_EQ(gap({{1, 1, 1, 1}}), 1.0);
  EXPECT_NEAR(gap({{0.2, 0.4, 0.6, 0.8}}), 0.5, 1e-15);
  EXPECT_EQ(gap({{0.2, 0.4, 0.6, 0.8}}, {0.25, 0.25, 0.25, 0.25}), gap({{0.2, 0.4, 0.6, 0.8}}));
}

TEST(GapReportTest, SelfCopyScoresZero) {
  const std::vector<ModelMetrics> models{{"self", records_with(0.0, 1.0)}, {"irm", records_with(2.0, 0.3)}};
  const auto report = build_gap_report("eight_s", 1, models, GapConfig{});
  ASSERT_EQ(report.models.size(), 2u);
  EXPECT_EQ(report.models[0].g, 0.0);
  EXPECT_EQ(report.models[1].g, 1.0);
  for (double v : report.models[0].normalized) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(report.normalization[metric_index(MetricId::iou)], (NormalizationRange{0.3, 1.0}));
}

TEST(GapReportTest, AddingAModelLeavesRawValuesAlone) {
  std::vector<ModelMetrics> models{{"a", records_with(1.0, 0.5)}, {"b", records_with(3.0, 0.2)}};
  const auto before = build_gap_report("s", 1, models, GapConfig{});
  models.push_back({"c", records_with(9.0, 0.9)});
  const auto after = build_gap_report("s", 1, models, GapConfig{});
  EXPECT_EQ(before.models[0].raw, after.models[0].raw);
  EXPECT_EQ(before.models[1].raw, after.models[1].raw);
  for (const auto& m : after.models) {
    EXPECT_GE(m.g, 0.0);
    EXPECT_LE(m.g, 1.0);
  }
}

TEST(GapReportTest, MissingMetricIsReported) {
  auto partial = records_with(1.0, 0.5);
  partial.pop_back();
  const std::vector<ModelMetrics> models{{"a", partial}, {"b", records_with(3.0, 0.2)}};
  EXPECT_THROW(build_gap_report("s", 1, models, GapConfig{}), std::invalid_argument);
}

TEST(GapConfigTest, Validation) {
  GapConfig c;
  c.mode = NormalizationMode::fixed;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = fixed_unit_ranges();
  c.fixed_ranges[0] = NormalizationRange{1.0, 1.0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = GapConfig{};
  c.level_weights = {0, 0, 0, 0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = GapConfig{};
  c.metric_weights[metric_index(MetricId::ospa)] = 0.0;
  c.metric_weights[metric_index(MetricId::iou)] = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
