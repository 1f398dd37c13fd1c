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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "incidents/error.hpp"
#include "incidents/synth.hpp"
#include "incidents/trainer.hpp"

namespace incidents {
namespace {

Taxonomy tiny() { return parse_taxonomy("[incidents]\na\nb\nc\n[places]\np\nq\n"); }

std::vector<PartialLabelRecord> ablation_records() {
  std::vector<PartialLabelRecord> r(4);
  r[0].incident_pos = 1;
  r[0].place_pos = 0;
  r[1].incident_neg = {0, 2};
  r[2].source = RecordSource::kPlacesAug;
  r[2].place_pos = 1;
  r[3].place_neg = {0};
  return r;
}

TEST(BatchTargetsTest, ClassNegativeAblations) {
  const auto records = ablation_records();
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  TrainConfig cfg;
  const BatchTargets with = batch_targets(records, rows, tiny(), cfg);
  EXPECT_EQ(with.incident[1].weights, (std::vector<double>{1, 0, 1}));
  EXPECT_EQ(with.incident[2].supervised(), 0u);
  EXPECT_EQ(with.place[2].targets, (std::vector<double>{0, 1}));

  cfg.use_class_negatives = false;
  const BatchTargets without = batch_targets(records, rows, tiny(), cfg);
  EXPECT_EQ(without.incident[1].supervised(), 0u);
  EXPECT_EQ(without.incident[0].supervised(), 3u);
}

TEST(BatchTargetsTest, CrossEntropyTargets) {
  const auto records = ablation_records();
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  TrainConfig cfg;
  cfg.loss = LossVariant::kCrossEntropy;
  const BatchTargets t = batch_targets(records, rows, tiny(), cfg);
  EXPECT_EQ(t.incident_ce[0], 1u);
  EXPECT_EQ(t.incident_ce[1], 3u);
  EXPECT_EQ(t.incident_ce[2], 3u);
  EXPECT_FALSE(t.incident_ce[3].has_value());
  EXPECT_EQ(t.place_ce[2], 1u);
  cfg.use_class_negatives = false;
  EXPECT_FALSE(batch_targets(records, rows, tiny(), cfg).incident_ce[1].has_value());
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  ModelShape s;
  s.input_dim = 2;
  s.hidden = {};
  s.incident_classes = 1;
  s.place_classes = 1;
  ModelParams p = zeros(s);
  ModelParams g = zeros_like(p);
  g.incident_head.weight(0, 0) = 3.0;
  g.incident_head.weight(0, 1) = -0.5;
  AdamState state(p);
  adam_step(p, g, state, 0.01);
  EXPECT_EQ(state.step(), 1u);
  EXPECT_NEAR(p.incident_head.weight(0, 0), -0.01, 1e-9);
  EXPECT_NEAR(p.incident_head.weight(0, 1), 0.01, 1e-9);
  EXPECT_EQ(p.place_head.weight(0, 0), 0.0);

  ModelParams before = p;
  g.place_head.bias(0) = std::nan("");
  EXPECT_THROW(adam_step(p, g, state, 0.01), NumericError);
  EXPECT_EQ(p.incident_head.weight, before.incident_head.weight);
  EXPECT_EQ(state.step(), 1u);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.lr = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.min_epochs = 5;
  cfg.max_epochs = 4;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

class TrainerFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SynthSpec spec;
    spec.n_incident_classes = 3;
    spec.n_place_classes = 2;
    spec.n_train_per_class = 30;
    spec.n_val_per_class = 10;
    spec.n_test_per_class = 10;
    spec.places_aug_per_class = 10;
    spec.dim = 8;
    world_ = new SynthWorld(synthesize(spec));
  }
  static void TearDownTestSuite() { delete world_; }
  static SynthWorld* world_;
};
SynthWorld* TrainerFixture::world_ = nullptr;

TEST_F(TrainerFixture, DeterministicAndBounded) {
  TrainConfig cfg = synth_train_config(0);
  cfg.min_epochs = 2;
  cfg.max_epochs = 4;
  const TrainResult a = train(world_->train, world_->val, world_->store, world_->taxonomy, cfg);
  const TrainResult b = train(world_->train, world_->val, world_->store, world_->taxonomy, cfg);
  EXPECT_EQ(a.params.trunk[0].weight, b.params.trunk[0].weight);
  EXPECT_GE(a.epochs.size(), 2u);
  EXPECT_LE(a.epochs.size(), 4u);
  EXPECT_GT(a.places_aug_rows_checked, 0u);
  for (const auto& e : a.epochs) {
    EXPECT_TRUE(std::isfinite(e.train_loss));
    EXPECT_TRUE(e.val_incident_map.has_value());
  }
  EXPECT_LT(a.epochs.back().train_loss, a.epochs.front().train_loss);
}

TEST_F(TrainerFixture, ConvergenceStopsBeforeMaxEpochs) {
  TrainConfig cfg = synth_train_config(1);
  cfg.min_epochs = 1;
  cfg.max_epochs = 200;
  cfg.patience = 1;
  cfg.min_improvement = 0.5;
  const TrainResult r = train(world_->train, world_->val, world_->store, world_->taxonomy, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.epochs.size(), 200u);
}

TEST_F(TrainerFixture, RejectsEmptyTrainingSet) {
  const std::vector<PartialLabelRecord> none;
  EXPECT_THROW(train(none, world_->val, world_->store, world_->taxonomy, TrainConfig{}), DataError);
}

TEST_F(TrainerFixture, PlacesAugRowsHaveZeroIncidentGradient) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < world_->train.size(); ++i) {
    if (world_->train[i].source == RecordSource::kPlacesAug) rows.push_back(i);
  }
  ASSERT_FALSE(rows.empty());
  std::vector<PartialLabelRecord> subset;
  for (std::size_t i : rows) subset.push_back(world_->train[i]);
  std::vector<std::size_t> local(subset.size());
  std::iota(local.begin(), local.end(), 0);
  ModelShape s;
  s.input_dim = world_->store.dim();
  s.incident_classes = 3;
  s.place_classes = 2;
  const ModelParams params = init_xavier_uniform(s, 3);
  const BatchTargets t = batch_targets(subset, local, world_->taxonomy, TrainConfig{});
  const BatchObjective obj =
      batch_objective(params, gather_embeddings(subset, world_->store), t, LossVariant::kClassNegative);
  EXPECT_EQ(obj.incident.grad_logits.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(obj.grads.incident_head.weight.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(obj.place.grad_logits.cwiseAbs().maxCoeff(), 0.0);
}

}  // namespace
}  // namespace incidents
