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

#include "incidents/model.hpp"
#include "incidents/random.hpp"

namespace {

incidents::ModelShape shape() {
  incidents::ModelShape s;
  s.input_dim = 512;
  s.hidden = {128};
  s.incident_classes = 43;
  s.place_classes = 49;
  return s;
}

Eigen::MatrixXd batch(Eigen::Index rows) {
  incidents::Rng rng(6);
  Eigen::MatrixXd x(rows, 512);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
  return x;
}

void BM_Forward(benchmark::State& state) {
  const auto params = incidents::init_xavier_uniform(shape(), 1);
  const Eigen::MatrixXd x = batch(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(incidents::forward(params, x));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(256);

void BM_ForwardBackward(benchmark::State& state) {
  const auto params = incidents::init_xavier_uniform(shape(), 1);
  const Eigen::MatrixXd x = batch(state.range(0));
  const Eigen::MatrixXd gi = Eigen::MatrixXd::Constant(state.range(0), 43, 0.01);
  const Eigen::MatrixXd gp = Eigen::MatrixXd::Constant(state.range(0), 49, 0.01);
  for (auto _ : state) {
    const auto cache = incidents::forward(params, x);
    benchmark::DoNotOptimize(incidents::backward(params, cache, gi, gp));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(64)->Arg(256);

}  // namespace
