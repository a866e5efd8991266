#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "radargap/assignment.hpp"
#include "radargap/config.hpp"
#include "radargap/metrics.hpp"
#include "radargap/pipeline.hpp"

using namespace radargap;

namespace {

std::vector<MetricPoint3> random_cloud(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> pos(-20.0, 20.0), dop(-10.0, 10.0);
  std::vector<MetricPoint3> out(n);
  for (auto& p : out) p = {pos(rng), pos(rng), dop(rng)};
  return out;
}

void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  CostMatrix cost(n, n);
  for (auto& v : cost.values) v = value(rng);
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(cost));
}
BENCHMARK(BM_Assignment)->RangeMultiplier(2)->Range(4, 64);

void BM_Wasserstein(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = random_cloud(rng, static_cast<std::size_t>(state.range(0)));
  const auto b = random_cloud(rng, static_cast<std::size_t>(state.range(0)) + 3);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein(a, b));
}
BENCHMARK(BM_Wasserstein)->RangeMultiplier(2)->Range(4, 64);

void BM_Ospa(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-30.0, 30.0);
  std::vector<Vec2> a(static_cast<std::size_t>(state.range(0))), b(a.size() + 2);
  for (auto& p : a) p = {pos(rng), pos(rng)};
  for (auto& p : b) p = {pos(rng), pos(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(ospa(a, b));
}
BENCHMARK(BM_Ospa)->RangeMultiplier(2)->Range(2, 32);

void BM_RtmFrame(benchmark::State& state) {
  const auto sc = build_scenario("overtake_m");
  const RtmParams params;
  Rng rng(4);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rtm_detect(sc.frames[k], sc.sensor, params, rng));
    k = (k + 1) % sc.frames.size();
  }
}
BENCHMARK(BM_RtmFrame);

void BM_EvaluateScenario(benchmark::State& state) {
  const auto config = default_config();
  const auto settings = config.settings();
  const auto sc = build_scenario("eight_s", config.dt);
  const std::vector<ModelSpec> models{{"irm", ModelKind::irm}, {"rtm", ModelKind::rtm}};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_scenario(sc, models, settings));
}
BENCHMARK(BM_EvaluateScenario)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
