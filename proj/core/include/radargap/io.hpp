#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "radargap/gap.hpp"
#include "radargap/perception.hpp"
#include "radargap/scenario.hpp"
#include "radargap/sensor_models.hpp"

namespace radargap {

/// Rounds to 9 significant decimal digits; every number the toolkit writes passes through
/// this, which makes write -> read -> write byte-stable. Negative zero becomes zero.
double quantize(double v);

/// "%.9g" text of `quantize(v)`.
std::string format_number(double v);

/// Thrown for unreadable or malformed files; the message names the file and line.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kScenarioSchema = "radargap.scenario/1";
inline constexpr std::string_view kDetectionSchema = "radargap.detections/1";
inline constexpr std::string_view kTrackSchema = "radargap.tracks/1";
inline constexpr std::string_view kReportSchema = "radargap.report/1";

// Line-delimited logs: a header record followed by one record per frame.

void write_scenario(std::ostream& out, const Scenario& scenario);
Scenario read_scenario(std::istream& in, const std::string& source = "<stream>");

struct DetectionLog {
  std::string scenario;
  std::string model;
  std::vector<PointCloud> clouds;

  bool operator==(const DetectionLog&) const = default;
};

void write_detections(std::ostream& out, const DetectionLog& log);
DetectionLog read_detections(std::istream& in, const std::string& source = "<stream>");

struct TrackLog {
  std::string scenario;
  std::string model;
  std::vector<std::vector<TrackEstimate>> frames;

  bool operator==(const TrackLog&) const = default;
};

void write_tracks(std::ostream& out, const TrackLog& log);
TrackLog read_tracks(std::istream& in, const std::string& source = "<stream>");

// Reports.

std::string report_to_json(const GapReport& report);
GapReport report_from_json(std::string_view text, const std::string& source = "<string>");

/// One row per (scenario, model): scenario,model,FL1,FL2,FL3,FL4,G.
std::string summary_csv(std::span<const GapReport> reports);

/// Table-style export: one row per (scenario, metric) with the fidelity level, the direction
/// arrow and one raw-value column per model. Models missing from a report leave empty cells.
std::string metric_table_csv(std::span<const GapReport> reports);

/// Radar-chart data: scenario,model,G.
std::string chart_data_csv(std::span<const GapReport> reports);

// Files.

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it into place.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace radargap
