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

#include <string>
#include <vector>

#include "incidents/dedup.hpp"
#include "incidents/random.hpp"

namespace {

using incidents::DedupConfig;
using incidents::DedupStrategy;
using incidents::DistanceMetric;

// Clustered cloud: n / 8 centers, each with 8 jittered copies.
incidents::EmbeddingStore make_store(std::size_t n, std::size_t dim) {
  incidents::Rng rng(1);
  std::vector<float> values(n * dim);
  std::vector<double> center(dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 8 == 0) {
      for (auto& c : center) c = rng.normal();
    }
    for (std::size_t j = 0; j < dim; ++j) {
      values[i * dim + j] = static_cast<float>(center[j] + 0.01 * rng.normal());
    }
  }
  return incidents::EmbeddingStore(dim, std::move(values));
}

void run_dedup(benchmark::State& state, DedupStrategy strategy, DistanceMetric metric) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto store = make_store(n, 32);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "img" + std::to_string(i);
  DedupConfig cfg;
  cfg.strategy = strategy;
  cfg.metric = metric;
  cfg.radius = metric == DistanceMetric::kCosine ? 0.01 : 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(incidents::dedup(store, ids, cfg));
  }
  state.SetComplexityN(state.range(0));
}

void BM_DedupBruteCosine(benchmark::State& s) {
  run_dedup(s, DedupStrategy::kBruteForce, DistanceMetric::kCosine);
}
void BM_DedupGridCosine(benchmark::State& s) {
  run_dedup(s, DedupStrategy::kGrid, DistanceMetric::kCosine);
}
void BM_DedupBruteEuclidean(benchmark::State& s) {
  run_dedup(s, DedupStrategy::kBruteForce, DistanceMetric::kEuclidean);
}
void BM_DedupGridEuclidean(benchmark::State& s) {
  run_dedup(s, DedupStrategy::kGrid, DistanceMetric::kEuclidean);
}

BENCHMARK(BM_DedupBruteCosine)->RangeMultiplier(4)->Range(256, 4096)->Complexity();
BENCHMARK(BM_DedupGridCosine)->RangeMultiplier(4)->Range(256, 4096)->Complexity();
BENCHMARK(BM_DedupBruteEuclidean)->RangeMultiplier(4)->Range(256, 4096)->Complexity();
BENCHMARK(BM_DedupGridEuclidean)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

}  // namespace
