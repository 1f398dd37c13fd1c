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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "incidents/dataset.hpp"

namespace incidents {

// Probabilities reported to users are clamped to [kProbabilityFloor,
// 1 - kProbabilityFloor]; losses never go through this clamp.
inline constexpr double kProbabilityFloor = 1e-7;

double sigmoid(double x) noexcept;
// log(1 + e^x) without overflow.
double softplus(double x) noexcept;
double clamp_probability(double p) noexcept;
std::vector<double> softmax(std::span<const double> logits);

struct LossOutput {
  double value = 0.0;
  std::vector<double> grad_logits;
  std::size_t supervised_count = 0;
};

/// Class-negative loss: masked binary cross-entropy on sigmoid outputs,
///   -sum_i w_i [y_i log s(x_i) + (1 - y_i) log(1 - s(x_i))],
/// evaluated as sum_i w_i softplus(+-x_i). Coordinates with w_i == 0 are
/// skipped entirely, so their gradient is exactly 0 and their logit never
/// touches the value. Throws DataError on non-binary targets or weights.
LossOutput cn_loss(std::span<const double> logits, std::span<const double> targets,
                   std::span<const double> weights);

/// Softmax cross-entropy, -log softmax(logits)[target_class], via log-sum-exp.
/// For the incident head the last index is "no incident".
LossOutput ce_loss(std::span<const double> logits, std::size_t target_class);

// L = L_incident + L_place.
double combined_loss(const LossOutput& incident, const LossOutput& place);

struct BatchLoss {
  double value = 0.0;             // sum over rows / batch size
  Eigen::MatrixXd grad_logits;    // d value / d logits
  std::size_t supervised_count = 0;
};

// Row-wise cn_loss with batch-mean reduction.
BatchLoss batch_cn_loss(const Eigen::MatrixXd& logits, std::span<const LabelView> labels);

// Row-wise ce_loss with batch-mean reduction; rows without a target add
// nothing but still count toward the batch size.
BatchLoss batch_ce_loss(const Eigen::MatrixXd& logits,
                        std::span<const std::optional<std::size_t>> targets);

}  // namespace incidents
