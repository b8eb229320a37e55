#include <map>
#include <vector>

#include <benchmark/benchmark.h>

#include "sls/evidence.h"
#include "sls/random.h"

namespace sls {
namespace {

// Frame of n limits with a random mass on every one of its subsets.
std::pair<Frame, MassFunction> DenseMass(int n, std::uint64_t seed) {
  std::vector<SpeedLimit> limits;
  for (int i = 0; i < n; ++i) limits.push_back(SpeedLimit::Kmh(10 + 5 * i));
  Frame frame(limits);
  SplitMix64 rng(seed);
  std::map<HypothesisSet, double> focal;
  double total = 0.0;
  for (HypothesisSet s = 1; s <= frame.full(); ++s) {
    const double w = rng.NextUnit() + 1e-3;
    focal[s] = w;
    total += w;
  }
  for (auto& [s, w] : focal) w /= total;
  return {frame, MassFunction(frame, focal)};
}

void BM_Combine(benchmark::State& state) {
  const auto [frame, a] = DenseMass(static_cast<int>(state.range(0)), 1);
  const MassFunction b = DenseMass(static_cast<int>(state.range(0)), 2).second;
  for (auto _ : state) benchmark::DoNotOptimize(Combine(a, b));
}
BENCHMARK(BM_Combine)->DenseRange(1, 8);

void BM_Plausibility(benchmark::State& state) {
  const auto [frame, m] = DenseMass(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    for (const SpeedLimit limit : frame.hypotheses()) {
      benchmark::DoNotOptimize(Plausibility(m, frame.Singleton(limit)));
    }
  }
}
BENCHMARK(BM_Plausibility)->DenseRange(1, 8);

}  // namespace
}  // namespace sls
