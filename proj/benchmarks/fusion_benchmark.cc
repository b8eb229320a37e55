#include <vector>

#include <benchmark/benchmark.h>

#include "sls/evidence.h"
#include "sls/fusion_logic.h"
#include "sls/random.h"
#include "sls/scenario.h"

namespace sls {
namespace {

constexpr int kLimits[] = {30, 50, 70, 80, 90, 110, 130};

std::vector<SensorEvent> MakeEvents(std::size_t count) {
  SplitMix64 rng(1);
  std::vector<SensorEvent> events;
  TimeMs t = 0;
  for (std::size_t i = 0; i < count; ++i) {
    t += static_cast<TimeMs>(rng.NextBelow(15'000));
    const SpeedLimit limit = SpeedLimit::Kmh(kLimits[rng.NextBelow(7)]);
    const Side side = rng.NextBelow(2) == 0 ? Side::kLeft : Side::kRight;
    switch (rng.NextBelow(4)) {
      case 0: events.push_back({t, VisionEvent{limit}}); break;
      case 1: events.push_back({t, VisionEvent{limit, SubSign::kExitArrow, side}}); break;
      case 2: events.push_back({t, CartoEvent{limit, rng.NextBelow(4) == 0}}); break;
      default: events.push_back({t, LaneChangeEvent{side}}); break;
    }
  }
  return events;
}

void BM_LogicRun(benchmark::State& state) {
  const std::vector<SensorEvent> events = MakeEvents(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Run(events, EngineConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogicRun)->Range(64, 16 << 10);

void BM_DsRun(benchmark::State& state) {
  const std::vector<SensorEvent> events = MakeEvents(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(DsRun(events, ReliabilityModel{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DsRun)->Range(64, 16 << 10);

void BM_InjectNoise(benchmark::State& state) {
  const Scenario scenario{"bench", MakeEvents(static_cast<std::size_t>(state.range(0)))};
  for (auto _ : state) benchmark::DoNotOptimize(InjectNoise(scenario, NoiseModel{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InjectNoise)->Range(64, 16 << 10);

}  // namespace
}  // namespace sls
