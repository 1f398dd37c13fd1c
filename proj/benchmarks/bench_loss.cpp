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

#include "incidents/loss.hpp"
#include "incidents/random.hpp"

namespace {

void BM_CnLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  incidents::Rng rng(2);
  std::vector<double> logits(n), targets(n, 0.0), weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    logits[i] = rng.uniform(-6.0, 6.0);
    weights[i] = rng.uniform01() < 0.5 ? 1.0 : 0.0;
  }
  targets[0] = 1.0;
  weights[0] = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(incidents::cn_loss(logits, targets, weights));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CnLoss)->Arg(43)->Arg(49)->Arg(1024);

void BM_CeLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  incidents::Rng rng(3);
  std::vector<double> logits(n);
  for (auto& x : logits) x = rng.uniform(-6.0, 6.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(incidents::ce_loss(logits, 0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CeLoss)->Arg(44)->Arg(1024);

void BM_BatchCnLoss(benchmark::State& state) {
  const auto rows = static_cast<Eigen::Index>(state.range(0));
  incidents::Rng rng(4);
  Eigen::MatrixXd logits(rows, 43);
  for (Eigen::Index i = 0; i < logits.size(); ++i) logits(i) = rng.uniform(-6.0, 6.0);
  std::vector<incidents::LabelView> labels(static_cast<std::size_t>(rows),
                                           {std::vector<double>(43, 0.0), std::vector<double>(43, 1.0)});
  for (auto _ : state) {
    benchmark::DoNotOptimize(incidents::batch_cn_loss(logits, labels));
  }
}
BENCHMARK(BM_BatchCnLoss)->Arg(256);

}  // namespace
