#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "radargap/harness.hpp"
#include "radargap/io.hpp"

using namespace radargap;
namespace fs = std::filesystem;

namespace {

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("radargap_harness_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  EvaluationConfig config(std::vector<std::string> scenarios, std::vector<std::string> models) const {
    CliOverrides cli;
    cli.out = dir_.string();
    cli.scenarios = std::move(scenarios);
    cli.models = std::move(models);
    return resolve_config(cli);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(HarnessTest, SimulateWritesReadableLogs) {
  std::ostringstream log;
  const auto files = cmd_simulate(config({"eight_s"}, {"irm"}), log);
  ASSERT_EQ(files.size(), 3u);
  std::ifstream in(dir_ / "eight_s" / "irm.detections.jsonl");
  const auto dlog = read_detections(in, "irm.detections.jsonl");
  ASSERT_EQ(dlog.clouds.size(), 600u);
  std::ifstream sin(dir_ / "eight_s" / "scenario.jsonl");
  const auto sc = read_scenario(sin);
  for (std::size_t k = 0; k < 600; ++k) {
    const bool visible = frame_visibility(sc.frames[k], sc.sensor)[0] > 0.0;
    EXPECT_EQ(dlog.clouds[k].detections.size(), visible ? 8u : 0u);
  }
  std::ifstream tin(dir_ / "eight_s" / "irm.tracks.jsonl");
  EXPECT_EQ(read_tracks(tin).frames.size(), 600u);
}

TEST_F(HarnessTest, SimulateIsIdempotent) {
  std::ostringstream log;
  const auto c = config({"overtake_m"}, {"rtm", "reference"});
  cmd_simulate(c, log);
  const auto first = read_text_file(dir_ / "overtake_m" / "rtm.detections.jsonl");
  const auto ref = read_text_file(dir_ / "overtake_m" / "reference.detections.jsonl");
  cmd_simulate(c, log);
  EXPECT_EQ(read_text_file(dir_ / "overtake_m" / "rtm.detections.jsonl"), first);
  EXPECT_EQ(read_text_file(dir_ / "overtake_m" / "reference.detections.jsonl"), ref);
}

TEST_F(HarnessTest, EvaluateWritesReportsAndSummary) {
  std::ostringstream log;
  auto c = config({"eight_s", "leading_s"}, {"irm", "ddm", "rtm"});
  c.jobs = 2;
  const auto result = cmd_evaluate(c, log);
  EXPECT_TRUE(result.errors.empty());
  ASSERT_EQ(result.reports.size(), 2u);
  const auto text = read_text_file(dir_ / "eight_s" / "report.json");
  EXPECT_EQ(report_to_json(report_from_json(text)), report_to_json(result.reports[0]));
  const auto summary = read_text_file(dir_ / "summary.csv");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 1 + 2 * 3);

  const std::vector<fs::path> one{dir_ / "eight_s" / "report.json"};
  const auto csv = cmd_report(one, ExportFormat::csv, log);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 11);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scenario,fidelity_level,metric,direction,irm,ddm,rtm");
  const std::vector<fs::path> both{dir_ / "eight_s" / "report.json", dir_ / "leading_s" / "report.json"};
  const auto chart = cmd_report(both, ExportFormat::chart_data, log);
  EXPECT_EQ(std::count(chart.begin(), chart.end(), '\n'), 1 + 6);
}

TEST_F(HarnessTest, EvaluateNeedsAComparisonSet) {
  std::ostringstream log;
  EXPECT_THROW(cmd_evaluate(config({"eight_s"}, {"irm"}), log), ConfigError);
}

TEST_F(HarnessTest, EvaluateReportsStageErrorsPerScenario) {
  std::ostringstream log;
  auto c = config({"eight_s", "leading_s"}, {"irm", "rtm"});
  c.scenarios[1].params.initial_range = 500.0;  // target never visible
  const auto result = cmd_evaluate(c, log);
  EXPECT_EQ(result.reports.size(), 1u);
  ASSERT_EQ(result.errors.size(), 1u);
  EXPECT_NE(result.errors[0].find("leading_s"), std::string::npos);
}

TEST_F(HarnessTest, ReportHandlesEmptyAndMalformedInput) {
  std::ostringstream log;
  EXPECT_EQ(cmd_report({}, ExportFormat::csv, log), "");
  EXPECT_NE(log.str().find("warning"), std::string::npos);
  write_text_file(dir_ / "bad.json", "{\"schema\": \"something/else\"}");
  const std::vector<fs::path> bad{dir_ / "bad.json"};
  EXPECT_THROW(cmd_report(bad, ExportFormat::csv, log), FormatError);
  const std::vector<fs::path> missing{dir_ / "nope.json"};
  EXPECT_THROW(cmd_report(missing, ExportFormat::csv, log), FormatError);
}

TEST_F(HarnessTest, UnwritableOutputIsAnError) {
  std::ostringstream log;
  fs::create_directories(dir_);
  write_text_file(dir_ / "file", "x");
  auto c = config({"leading_s"}, {"irm"});
  c.output_dir = (dir_ / "file").string();  // a file, not a directory
  EXPECT_THROW(cmd_simulate(c, log), std::exception);
}
