/*
 * Copyright 2026 The t2t Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <random>

#include "t2t/contact.hpp"
#include "t2t/dataset.hpp"
#include "t2t/geometry.hpp"
#include "t2t/interp.hpp"
#include "t2t/metrics.hpp"
#include "t2t/translate.hpp"

namespace t2t {
namespace {

ArraySample RandomArray(const TaxelLayout& layout, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, static_cast<float>(kFullScale));
  ArraySample y;
  y.layout_id = layout.id();
  for (std::size_t i = 0; i < layout.n_taxels(); ++i) y.values.push_back(u(rng));
  return y;
}

TactileImage RandomImage(const PixelGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  TactileImage img(grid);
  for (float& v : img.data()) v = u(rng);
  return img;
}

void BM_Delaunay(benchmark::State& state) {
  const TaxelLayout layout = BuildDefaultLayout();
  for (auto _ : state) benchmark::DoNotOptimize(Delaunay(layout));
}
BENCHMARK(BM_Delaunay);

void BM_PhiOperatorBuild(benchmark::State& state) {
  const TaxelLayout layout = BuildDefaultLayout();
  const PixelGrid grid = FitTactileGrid(layout);
  for (auto _ : state) benchmark::DoNotOptimize(PhiOperator(layout, grid));
}
BENCHMARK(BM_PhiOperatorBuild)->Unit(benchmark::kMillisecond);

void BM_PhiApply(benchmark::State& state) {
  const TaxelLayout layout = BuildDefaultLayout();
  const PhiOperator phi(layout, FitTactileGrid(layout));
  const ArraySample y = RandomArray(layout, 1);
  for (auto _ : state) benchmark::DoNotOptimize(phi.Apply(y));
}
BENCHMARK(BM_PhiApply)->Unit(benchmark::kMicrosecond);

void BM_PhiInv(benchmark::State& state) {
  const TaxelLayout layout = BuildDefaultLayout();
  const TactileImage image = Phi(RandomArray(layout, 2), layout, FitTactileGrid(layout));
  for (auto _ : state) benchmark::DoNotOptimize(PhiInv(image, layout));
}
BENCHMARK(BM_PhiInv)->Unit(benchmark::kMicrosecond);

void BM_SimulateSample(benchmark::State& state) {
  const DatasetConfig cfg = DefaultDatasetConfig(Corpus::kPrimitives);
  const auto specs = EnumerateSamples(cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(SimulateSample(specs[i], cfg));
    i = (i + 997) % specs.size();
  }
}
BENCHMARK(BM_SimulateSample)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const PixelGrid grid = FitTactileGrid(BuildDefaultLayout());
  const TactileImage a = RandomImage(grid, 3), b = RandomImage(grid, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Ssim(a, b, kCameraRange));
}
BENCHMARK(BM_Ssim)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const ModelGeometry g = DefaultModelGeometry();
  const TrainConfig cfg = DefaultTrainConfig(kind);
  Inference runner(InitModel(kind, g, cfg));
  const TactileImage x = RandomImage(DownsampleGrid(g.input_grid, cfg.downsample), 5);
  for (auto _ : state) benchmark::DoNotOptimize(runner.Forward(x));
  state.SetLabel(std::string(ModelKindName(kind)));
}
BENCHMARK(BM_Forward)
    ->Arg(static_cast<int>(ModelKind::kImageSpace))
    ->Arg(static_cast<int>(ModelKind::kArraySpace))
    ->Unit(benchmark::kMillisecond);

void BM_Backward(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const ModelGeometry g = DefaultModelGeometry();
  const TrainConfig cfg = DefaultTrainConfig(kind);
  const TranslatorModel m = InitModel(kind, g, cfg);
  const TactileImage x = RandomImage(m.model_grid(), 6);
  const ArraySample y = RandomArray(m.layout, 7);
  for (auto _ : state) benchmark::DoNotOptimize(Backward(m, x, y));
  state.SetLabel(std::string(ModelKindName(kind)));
}
BENCHMARK(BM_Backward)
    ->Arg(static_cast<int>(ModelKind::kImageSpace))
    ->Arg(static_cast<int>(ModelKind::kArraySpace))
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace t2t

BENCHMARK_MAIN();
