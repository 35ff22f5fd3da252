// Copyright 2026 The dp_accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>

#include "benchmark/benchmark.h"
#include "dp_accounting/accountant.h"
#include "dp_accounting/mechanism_curves.h"
#include "dp_accounting/optimistic_estimator.h"
#include "dp_accounting/pessimistic_estimator.h"

namespace dp_accounting {
namespace {

MechanismSpec SubsampledGaussian() {
  return MechanismSpec::PoissonSubsampled(MechanismSpec::Gaussian(1), 0.01);
}

DiscretizationGrid GridFor(const HockeyStickCurve& curve, double d) {
  return *BuildGrid(curve, {.discretization = d, .epsilon_range = std::nullopt});
}

void BM_PessimisticPair(benchmark::State& state) {
  auto curve = CurveFor(SubsampledGaussian());
  const DiscretizationGrid grid = GridFor(**curve, 1.0 / state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(PessimisticPair(**curve, grid));
  }
  state.counters["points"] = static_cast<double>(grid.size());
}
BENCHMARK(BM_PessimisticPair)->Arg(200)->Arg(2000)->Arg(20000);

void BM_OptimisticPair(benchmark::State& state) {
  auto curve = CurveFor(SubsampledGaussian());
  const DiscretizationGrid grid = GridFor(**curve, 1.0 / state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(OptimisticPair(**curve, grid));
  }
  state.counters["points"] = static_cast<double>(grid.size());
}
BENCHMARK(BM_OptimisticPair)->Arg(200)->Arg(2000)->Arg(20000);

void BM_ComputeBounds(benchmark::State& state) {
  AccountingRequest request;
  request.mechanism = SubsampledGaussian();
  request.compositions = state.range(0);
  request.delta_target = 1e-5;
  request.grid.discretization = 0.005;
  for (auto _ : state) benchmark::DoNotOptimize(ComputeBounds(request));
}
BENCHMARK(BM_ComputeBounds)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dp_accounting

BENCHMARK_MAIN();
