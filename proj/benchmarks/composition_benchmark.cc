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
#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "dp_accounting/accountant.h"
#include "dp_accounting/composition.h"
#include "dp_accounting/finite_pld.h"
#include "dp_accounting/mechanism_curves.h"
#include "dp_accounting/pessimistic_estimator.h"

namespace dp_accounting {
namespace {

std::vector<double> RandomMasses(size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> dist(0, 1);
  std::vector<double> masses(n);
  for (double& m : masses) m = dist(rng) / static_cast<double>(n);
  return masses;
}

void BM_ConvolveDirect(benchmark::State& state) {
  const std::vector<double> a = RandomMasses(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ConvolveDirect(a, a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvolveDirect)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_ConvolveFft(benchmark::State& state) {
  const std::vector<double> a = RandomMasses(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ConvolveFft(a, a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvolveFft)->RangeMultiplier(4)->Range(64, 1 << 20)->Complexity();

// Self-composition of the pessimistic Gaussian distribution with sigma = 80
// on the interval 0.005, the setting of the Gaussian preset.
void BM_SelfComposeGaussian(benchmark::State& state) {
  auto curve = CurveFor(MechanismSpec::Gaussian(80));
  auto grid = BuildGrid(**curve, {.discretization = 0.005,
                                  .epsilon_range = std::nullopt});
  const FinitePld pld = *PldOf(*PessimisticPair(**curve, *grid));
  for (auto _ : state) {
    benchmark::DoNotOptimize(SelfCompose(pld, state.range(0), {}));
  }
}
BENCHMARK(BM_SelfComposeGaussian)
    ->Arg(100)
    ->Arg(1000)
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dp_accounting

BENCHMARK_MAIN();
