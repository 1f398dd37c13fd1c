// Copyright 2026 The Incidents Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "incidents/eval.hpp"
#include "incidents/random.hpp"

namespace {

void BM_AveragePrecision(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  incidents::Rng rng(5);
  std::vector<incidents::RankedItem> items(n);
  for (std::size_t i = 0; i < n; ++i) items[i] = {rng.uniform01(), rng.uniform01() < 0.1, i};
  for (auto _ : state) {
    benchmark::DoNotOptimize(incidents::average_precision(items));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AveragePrecision)->RangeMultiplier(8)->Range(512, 1 << 18)->Complexity();

}  // namespace
