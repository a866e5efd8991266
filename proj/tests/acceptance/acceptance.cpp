// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero on any FAIL.
// Usage: radargap_acceptance <work_dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "radargap/harness.hpp"
#include "radargap/io.hpp"
#include "radargap/pipeline.hpp"

using namespace radargap;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<MetricPoint3> random_cloud(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> pos(-20.0, 20.0), dop(-10.0, 10.0);
  std::vector<MetricPoint3> out(n);
  for (auto& p : out) p = {pos(rng), pos(rng), dop(rng)};
  return out;
}

std::vector<Vec2> random_points(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::vector<Vec2> out(n);
  for (auto& p : out) p = {pos(rng), pos(rng)};
  return out;
}

std::vector<oracle::P3> to_oracle(const std::vector<MetricPoint3>& v) {
  std::vector<oracle::P3> out;
  for (const auto& p : v) out.push_back({p.x, p.y, p.d});
  return out;
}

std::vector<oracle::P2> to_oracle(const std::vector<Vec2>& v) {
  std::vector<oracle::P2> out;
  for (const auto& p : v) out.push_back({p.x, p.y});
  return out;
}

/// Evaluation config for one scenario and the given model kinds, writing under `out`.
EvaluationConfig selection(const fs::path& out, std::vector<std::string> scenarios, std::vector<std::string> models) {
  CliOverrides cli;
  cli.out = out.string();
  cli.scenarios = std::move(scenarios);
  cli.models = std::move(models);
  return resolve_config(cli);
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> size(1, 8), size0(0, 8);
  double wd_err = 0.0, ospa_err = 0.0;
  int dpp_mismatch = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_cloud(rng, size(rng));
    const auto b = random_cloud(rng, size(rng));
    wd_err = std::max(wd_err, std::abs(wasserstein(a, b) - oracle::emd_lp(to_oracle(a), to_oracle(b))));
    const double fwd = oracle::chamfer(to_oracle(a), to_oracle(b));
    const double bwd = oracle::chamfer(to_oracle(b), to_oracle(a));
    if (dpp(a, b) != fwd || dpp_worst(a, b) != std::max(fwd, bwd)) ++dpp_mismatch;
    const auto pa = random_points(rng, size0(rng));
    const auto pb = random_points(rng, size0(rng));
    ospa_err = std::max(ospa_err, std::abs(ospa(pa, pb, 2.0, 5.0) - oracle::ospa(to_oracle(pa), to_oracle(pb), 2.0, 5.0)));
  }
  const double t = seconds_since(t0);
  return {wd_err <= 1e-6 && ospa_err <= 1e-9 && dpp_mismatch == 0 && t < 60.0,
          fmt("500 pairs; max |WD-LP| %.2e, max |OSPA-perm| %.2e, ", wd_err, ospa_err) +
              std::to_string(dpp_mismatch) + fmt(" DPP mismatches, %.1f s", t)};
}

Outcome metric_axioms() {
  std::mt19937_64 rng(2002);
  std::uniform_int_distribution<std::size_t> size(1, 8), size0(0, 8);
  constexpr double tol = 1e-9;
  int violations = 0;
  double ospa_max = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_cloud(rng, size(rng)), b = random_cloud(rng, size(rng)), c = random_cloud(rng, size(rng));
    const double ab = wasserstein(a, b), bc = wasserstein(b, c), ac = wasserstein(a, c);
    if (std::abs(ab - wasserstein(b, a)) > tol) ++violations;
    if (wasserstein(a, a) > tol || ab <= tol) ++violations;
    if (ac > ab + bc + tol) ++violations;

    const auto pa = random_points(rng, size0(rng)), pb = random_points(rng, size0(rng)), pc = random_points(rng, size0(rng));
    const double oab = ospa(pa, pb), obc = ospa(pb, pc), oac = ospa(pa, pc);
    if (std::abs(oab - ospa(pb, pa)) > tol) ++violations;
    if (ospa(pa, pa) > tol || (!(pa.empty() && pb.empty()) && oab <= tol)) ++violations;
    if (oac > oab + obc + tol) ++violations;
    ospa_max = std::max({ospa_max, oab, obc, oac});
  }
  if (ospa_max > 5.0) ++violations;

  std::uniform_real_distribution<double> pos(-5.0, 5.0), yaw(-std::numbers::pi, std::numbers::pi), ext(0.5, 6.0);
  double iou_shift = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const OrientedBox a{{pos(rng), pos(rng)}, yaw(rng), ext(rng), ext(rng)};
    OrientedBox b{{pos(rng), pos(rng)}, yaw(rng), ext(rng), ext(rng)};
    if (trial % 2 == 0) b.center = a.center + Vec2{0.4, 0.7};
    const double v = box_iou(a, b);
    if (!(v >= 0.0 && v <= 1.0)) ++violations;
    const double turn = yaw(rng);
    const Vec2 shift{pos(rng) * 10.0, pos(rng) * 10.0};
    const auto move = [&](OrientedBox box) {
      box.center = rotate(box.center, turn) + shift;
      box.yaw = wrap_angle(box.yaw + turn);
      return box;
    };
    iou_shift = std::max(iou_shift, std::abs(box_iou(move(a), move(b)) - v));
  }
  if (iou_shift > 1e-9) ++violations;
  return {violations == 0, std::to_string(violations) + fmt(" violations over 200 triples; max OSPA %.3f, max IoU change under rigid motion %.2e", ospa_max, iou_shift)};
}

Outcome self_identity() {
  const auto config = default_config();
  const auto settings = config.settings();
  const std::vector<ModelSpec> models{{"self", ModelKind::reference, 0.0}, {"irm", ModelKind::irm, 0.0}};
  int bad = 0;
  std::string failing;
  for (const auto& entry : config.scenarios) {
    const auto report = evaluate_scenario(build_configured_scenario(entry, config.dt), models, settings);
    const auto& self = report.models.at(0);
    bool ok = self.g == 0.0;
    for (MetricId id : kAllMetrics) {
      const double expected = id == MetricId::iou ? 1.0 : 0.0;
      ok = ok && self.raw[metric_index(id)] == expected;
    }
    if (!ok) {
      ++bad;
      failing += " " + entry.name;
    }
  }
  return {bad == 0, bad == 0 ? "8/8 scenarios: raw metrics 0, IoU 1, G = 0" : "mismatch in" + failing};
}

Outcome noise_monotonicity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto config = default_config();
  const auto sc = build_scenario("eight_s", config.dt);
  const std::array<double, 4> sigmas{0.0, 0.1, 0.3, 1.0};
  std::array<double, 4> mean_dpp{}, mean_wd{};
  constexpr int seeds = 20;
  for (int s = 1; s <= seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const auto reference = simulate_reference(sc, config.sensor_models, seed);
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
      const ModelSpec perturbed{"perturbed", ModelKind::reference, sigmas[k]};
      const auto clouds = simulate_model(sc, perturbed, config.sensor_models, seed);
      for (const auto& r : explicit_metrics(reference, clouds, sc.sensor, config.metrics)) {
        if (r.id == MetricId::dpp) mean_dpp[k] += r.scenario_mean / seeds;
        if (r.id == MetricId::wd) mean_wd[k] += r.scenario_mean / seeds;
      }
    }
  }
  bool ok = true;
  for (std::size_t k = 1; k < sigmas.size(); ++k) ok = ok && mean_dpp[k] >= mean_dpp[k - 1] && mean_wd[k] >= mean_wd[k - 1];
  const double t = seconds_since(t0);
  std::string detail = "DPP";
  for (double v : mean_dpp) detail += fmt(" %.4f", v);
  detail += ", WD";
  for (double v : mean_wd) detail += fmt(" %.4f", v);
  detail += fmt(" for sigma 0/0.1/0.3/1.0 over 20 seeds, %.1f s", t);
  return {ok && t < 300.0, detail};
}

Outcome table_structure(const fs::path& work) {
  std::ostringstream log;
  const auto config = selection(work / "c5", {"eight_s"}, {"irm", "ddm", "rtm"});
  const auto result = cmd_evaluate(config, log);
  if (!result.errors.empty()) return {false, result.errors.front()};
  const json doc = json::parse(read_text_file(work / "c5" / "eight_s" / "report.json"));
  struct Row {
    const char* name;
    int level;
    const char* arrow;
  };
  const std::vector<Row> expected{{"OSPA", 1, "↓"},  {"IoU", 1, "↑"},      {"RMSE_x", 2, "↓"}, {"RMSE_y", 2, "↓"},
                                  {"CardinalityError", 2, "↓"}, {"DPP", 3, "↓"}, {"WD", 3, "↓"},
                                  {"PNE", 4, "↓"},   {"WD_r", 4, "↓"},     {"WD_phi", 4, "↓"}, {"WD_doppler", 4, "↓"}};
  const auto& metrics = doc.at("metrics");
  if (metrics.size() != expected.size()) return {false, "metric count " + std::to_string(metrics.size())};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& m = metrics[i];
    if (m.at("name") != expected[i].name || m.at("fidelity_level") != expected[i].level ||
        m.at("arrow") != expected[i].arrow) {
      return {false, "metric row " + std::to_string(i) + " is " + m.dump()};
    }
  }
  const auto& models = doc.at("models");
  if (models.size() != 3) return {false, "model count " + std::to_string(models.size())};
  std::string detail = "11 metrics in FL I-IV with arrows; G";
  for (const auto& m : models) {
    if (m.at("raw").size() != 11 || m.at("normalized").size() != 11) return {false, "incomplete metrics"};
    for (const char* fl : {"FL1", "FL2", "FL3", "FL4"}) {
      const double v = m.at("fidelity_levels").at(fl);
      if (!(v >= 0.0 && v <= 1.0)) return {false, std::string(fl) + " out of range"};
    }
    const double g = m.at("G");
    if (!(g >= 0.0 && g <= 1.0)) return {false, "G out of range"};
    detail += " " + m.at("name").get<std::string>() + fmt("=%.3f", g);
  }
  return {true, detail};
}

Outcome full_run(const fs::path& work) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream log;
  CliOverrides cli;
  cli.out = (work / "c6").string();
  const auto result = cmd_evaluate(resolve_config(cli), log);
  const double t = seconds_since(t0);
  int values = 0, in_range = 0;
  for (const auto& r : result.reports) {
    for (const auto& m : r.models) {
      ++values;
      if (m.g >= 0.0 && m.g <= 1.0) ++in_range;
    }
  }
  return {result.errors.empty() && values == 24 && in_range == 24 && t < 600.0,
          std::to_string(values) + " G values, " + std::to_string(in_range) + fmt(" in [0,1], %.1f s", t)};
}

Outcome iou_direction() {
  const auto config = default_config();
  const auto sc = build_scenario("eight_s", config.dt);
  const std::vector<ModelSpec> models{{"irm", ModelKind::irm, 0.0}, {"rtm", ModelKind::rtm, 0.0}};
  std::vector<double> irm, rtm;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto settings = config.settings();
    settings.seed = seed;
    const auto report = evaluate_scenario(sc, models, settings);
    irm.push_back(report.models[0].raw[metric_index(MetricId::iou)]);
    rtm.push_back(report.models[1].raw[metric_index(MetricId::iou)]);
  }
  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return (v[4] + v[5]) / 2.0;
  };
  const double mi = median(irm), mr = median(rtm);
  return {mi > mr, fmt("median IoU over 10 seeds: IRM %.3f, RTM %.3f", mi, mr)};
}

Outcome determinism(const fs::path& work) {
  std::ostringstream log;
  CliOverrides cli;
  cli.seed = 42;
  cli.out = (work / "c8a").string();
  const auto a = resolve_config(cli);
  cli.out = (work / "c8b").string();
  auto b = resolve_config(cli);
  b.jobs = 2;  // scheduling must not leak into the output
  if (!cmd_evaluate(a, log).errors.empty() || !cmd_evaluate(b, log).errors.empty()) return {false, "evaluation error"};
  int compared = 0;
  for (const auto& entry : a.scenarios) {
    const fs::path rel = fs::path(entry.name) / "report.json";
    if (read_text_file(work / "c8a" / rel) != read_text_file(work / "c8b" / rel)) return {false, rel.string() + " differs"};
    ++compared;
  }
  if (read_text_file(work / "c8a" / "summary.csv") != read_text_file(work / "c8b" / "summary.csv")) {
    return {false, "summary.csv differs"};
  }
  return {true, std::to_string(compared) + " report files and summary.csv byte-identical across two runs"};
}

/// Same state advanced by `h` seconds at constant velocity.
ObjectState advance(const ObjectState& s, double h) {
  ObjectState out = s;
  const Vec2 v = s.velocity();
  out.x += v.x * h;
  out.y += v.y * h;
  return out;
}

Outcome kinematics() {
  double worst_ratio = 0.0;
  for (auto name : kScenarioNames) {
    const auto sc = build_scenario(name);
    const double h = sc.dt * 1e-3;
    for (const auto& f : sc.frames) {
      for (const auto& t : f.targets) {
        const auto range_at = [&](double dt) {
          return to_sensor_frame(advance(t, dt), advance(f.ego, dt), sc.sensor).range;
        };
        const double fd = (8.0 * (range_at(h) - range_at(-h)) - (range_at(2 * h) - range_at(-2 * h))) / (12.0 * h);
        worst_ratio = std::max(worst_ratio, std::abs(to_sensor_frame(t, f.ego, sc.sensor).radial_velocity - fd) / (1e-6 * sc.dt));
      }
    }
  }
  const RtmParams params;
  const double law = 40.0 * std::log10(2.0);
  double snr_err = 0.0;
  for (double r = 0.5; r < 100.0; r *= 1.37) {
    for (double rcs : {0.1, 1.0, 10.0}) {
      snr_err = std::max(snr_err, std::abs(rtm_snr_db(params, r, rcs) - rtm_snr_db(params, 2 * r, rcs) - law));
    }
  }
  return {worst_ratio <= 1.0 && snr_err <= 1e-6,
          fmt("worst radial-velocity error %.3f of 1e-6*dt; SNR drop per doubling %.6f dB, max deviation %.2e dB",
              worst_ratio, law, snr_err)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "radargap_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"metric oracle equivalence", oracle_equivalence},
      {"metric axioms", metric_axioms},
      {"self-identity gap", self_identity},
      {"noise monotonicity", noise_monotonicity},
      {"metric table structure", [&] { return table_structure(work); }},
      {"full scenario x model run", [&] { return full_run(work); }},
      {"IoU ordering IRM over RTM", iou_direction},
      {"determinism", [&] { return determinism(work); }},
      {"kinematic and SNR checks", kinematics},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu: %s -- %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
