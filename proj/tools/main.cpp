#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "radargap/harness.hpp"
#include "radargap/io.hpp"

namespace {

namespace fs = std::filesystem;

void add_common(CLI::App* cmd, std::string& config, std::uint64_t& seed, std::string& out,
                int& jobs, std::vector<std::string>& scenarios, std::vector<std::string>& models) {
  cmd->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", seed, "master seed (overrides the config)");
  cmd->add_option("--out", out, "output directory (overrides RADARGAP_OUT and the config)");
  cmd->add_option("--jobs", jobs, "scenarios evaluated in parallel")->check(CLI::PositiveNumber);
  cmd->add_option("--scenarios", scenarios, "comma-separated scenario names")->delimiter(',');
  cmd->add_option("--models", models, "comma-separated model names")->delimiter(',');
}

radargap::CliOverrides collect(CLI::App* cmd, const std::string& config, std::uint64_t seed, const std::string& out,
                               int jobs, const std::vector<std::string>& scenarios,
                               const std::vector<std::string>& models) {
  radargap::CliOverrides cli;
  if (cmd->count("--config") > 0) cli.config_path = config;
  if (cmd->count("--seed") > 0) cli.seed = seed;
  if (cmd->count("--out") > 0) cli.out = out;
  if (cmd->count("--jobs") > 0) cli.jobs = jobs;
  if (cmd->count("--scenarios") > 0) cli.scenarios = scenarios;
  if (cmd->count("--models") > 0) cli.models = models;
  return cli;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radargap - radar sensor model simulation-to-reality gap toolkit"};
  app.require_subcommand(1);

  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 1;
  std::vector<std::string> scenarios, models;

  auto* simulate = app.add_subcommand("simulate", "write ground truth, detection and track logs");
  add_common(simulate, config, seed, out, jobs, scenarios, models);
  auto* evaluate = app.add_subcommand("evaluate", "evaluate models against the reference sensor");
  add_common(evaluate, config, seed, out, jobs, scenarios, models);

  auto* report = app.add_subcommand("report", "export report files as a flat table");
  std::vector<std::string> report_files;
  std::string format = "csv";
  std::string report_out;
  report->add_option("reports", report_files, "report.json files");
  report->add_option("--format", format, "csv | chart-data")->check(CLI::IsMember({"csv", "chart-data"}));
  report->add_option("--out", report_out, "write the export to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate || *evaluate) {
      auto* cmd = *simulate ? simulate : evaluate;
      const auto cfg = radargap::resolve_config(collect(cmd, config, seed, out, jobs, scenarios, models));
      if (*simulate) {
        const auto files = radargap::cmd_simulate(cfg, std::cerr);
        std::cerr << "wrote " << files.size() << " files to " << cfg.output_dir << "\n";
        return 0;
      }
      const auto result = radargap::cmd_evaluate(cfg, std::cerr);
      for (const auto& e : result.errors) std::cerr << "error: " << e << "\n";
      std::cerr << "wrote " << result.reports.size() << " reports and summary.csv to " << cfg.output_dir << "\n";
      return result.errors.empty() ? 0 : 1;
    }
    std::vector<fs::path> paths(report_files.begin(), report_files.end());
    const auto text = radargap::cmd_report(paths, format == "csv" ? radargap::ExportFormat::csv
                                                                  : radargap::ExportFormat::chart_data,
                                           std::cerr);
    if (report_out.empty()) {
      std::cout << text;
    } else {
      radargap::write_text_file(report_out, text);
    }
    return 0;
  } catch (const radargap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
