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

#include "incidents/error.hpp"
#include "incidents/loss.hpp"
#include "incidents/model.hpp"
#include "incidents/random.hpp"
#include "support/oracles.hpp"

namespace incidents {
namespace {

ModelShape shape(LossVariant v) {
  ModelShape s;
  s.input_dim = 4;
  s.hidden = {5, 3};
  s.incident_classes = 3;
  s.place_classes = 2;
  s.variant = v;
  return s;
}

TEST(ModelTest, ShapesAndCounts) {
  const ModelParams p = init_xavier_uniform(shape(LossVariant::kCrossEntropy), 1);
  EXPECT_EQ(p.input_dim(), 4u);
  EXPECT_EQ(p.feature_dim(), 3u);
  EXPECT_EQ(p.incident_head.weight.rows(), 4);
  EXPECT_EQ(p.parameter_count(), (4 * 5 + 5) + (5 * 3 + 3) + (3 * 4 + 4) + (3 * 2 + 2));
  EXPECT_EQ(p.tensors().size(), 8u);
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.trunk[0].bias.norm(), 0.0);
}

TEST(ModelTest, XavierBoundsAndSeeding) {
  const ModelParams a = init_xavier_uniform(shape(LossVariant::kClassNegative), 3);
  const ModelParams b = init_xavier_uniform(shape(LossVariant::kClassNegative), 3);
  const ModelParams c = init_xavier_uniform(shape(LossVariant::kClassNegative), 4);
  EXPECT_EQ(a.trunk[0].weight, b.trunk[0].weight);
  EXPECT_NE(a.trunk[0].weight, c.trunk[0].weight);
  const double bound = std::sqrt(6.0 / (4 + 5));
  EXPECT_LE(a.trunk[0].weight.cwiseAbs().maxCoeff(), bound);
}

TEST(ModelTest, ValidateCatchesCorruption) {
  ModelParams p = init_xavier_uniform(shape(LossVariant::kClassNegative), 1);
  p.trunk[1].weight(0, 0) = std::nan("");
  EXPECT_THROW(p.validate(), DataError);
  ModelParams q = init_xavier_uniform(shape(LossVariant::kClassNegative), 1);
  q.place_head.bias.resize(7);
  EXPECT_THROW(q.validate(), DataError);
}

TEST(ModelTest, BackwardMatchesFiniteDifference) {
  for (LossVariant v : {LossVariant::kClassNegative, LossVariant::kCrossEntropy}) {
    const ModelParams params = init_xavier_uniform(shape(v), 11);
    Rng rng(5);
    Eigen::MatrixXd x(3, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
    Eigen::MatrixXd gi(3, static_cast<Eigen::Index>(shape(v).incident_outputs()));
    Eigen::MatrixXd gp(3, 2);
    for (Eigen::Index i = 0; i < gi.size(); ++i) gi(i) = rng.normal();
    for (Eigen::Index i = 0; i < gp.size(); ++i) gp(i) = rng.normal();

    // Linear functional of the logits: its gradient is backward(gi, gp).
    auto objective = [&](const ModelParams& p) {
      const ForwardCache c = forward(p, x);
      return (c.incident_logits.cwiseProduct(gi)).sum() + (c.place_logits.cwiseProduct(gp)).sum();
    };
    const ModelParams grads = backward(params, forward(params, x), gi, gp);
    const auto g = grads.tensors();
    ModelParams probe = params;
    auto t = probe.tensors();
    double worst = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      for (std::size_t j = 0; j < t[k].size(); ++j) {
        const double orig = t[k][j];
        t[k][j] = orig + 1e-5;
        const double up = objective(probe);
        t[k][j] = orig - 1e-5;
        const double down = objective(probe);
        t[k][j] = orig;
        worst = std::max(worst, oracle::relative_error(g[k][j], (up - down) / 2e-5));
      }
    }
    EXPECT_LT(worst, 1e-5) << to_string(v);
  }
}

TEST(ModelTest, PredictDropsNoIncidentColumn) {
  const ModelParams ce = init_xavier_uniform(shape(LossVariant::kCrossEntropy), 2);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 4);
  const Predictions p = predict(ce, LossVariant::kCrossEntropy, x);
  EXPECT_EQ(p.incident.cols(), 3);
  EXPECT_LT(p.incident.row(0).sum(), 1.0);
  EXPECT_NEAR(p.place.row(0).sum(), 1.0, 1e-12);

  const ModelParams cn = init_xavier_uniform(shape(LossVariant::kClassNegative), 2);
  const Predictions q = predict(cn, LossVariant::kClassNegative, x);
  const ForwardCache c = forward(cn, x);
  EXPECT_NEAR(q.incident(0, 1), sigmoid(c.incident_logits(0, 1)), 1e-15);
}

TEST(ModelTest, VariantNames) {
  EXPECT_EQ(parse_loss_variant("cn"), LossVariant::kClassNegative);
  EXPECT_EQ(parse_loss_variant(to_string(LossVariant::kCrossEntropy)), LossVariant::kCrossEntropy);
  EXPECT_THROW(parse_loss_variant("hinge"), ConfigError);
}

}  // namespace
}  // namespace incidents
