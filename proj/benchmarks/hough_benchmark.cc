#include <benchmark/benchmark.h>

#include "sls/lane_vision.h"

namespace sls {
namespace {

void BM_HoughTransform(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const int height = width * 3 / 8;
  const GradientImage image = RenderSyntheticRoad(
      {width, height, {{width * 0.3, width * 0.1}, {width * 0.7, width * 0.9}}});
  for (auto _ : state) benchmark::DoNotOptimize(HoughTransform(image, HoughParams{}));
}
BENCHMARK(BM_HoughTransform)->RangeMultiplier(2)->Range(80, 640);

void BM_LanePipeline(benchmark::State& state) {
  const std::vector<GradientImage> frames =
      RenderDriveSequence({.drift_per_frame = 2, .frames = static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(RunLanePipeline(frames, LanePipelineParams{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LanePipeline)->Arg(40)->Arg(160);

}  // namespace
}  // namespace sls
