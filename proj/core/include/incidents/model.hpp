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
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace incidents {

enum class LossVariant {
  kClassNegative,  // masked sigmoid BCE per class
  kCrossEntropy,   // softmax CE with an extra "no incident" output
};

const char* to_string(LossVariant variant) noexcept;
LossVariant parse_loss_variant(std::string_view text);

struct DenseLayer {
  Eigen::MatrixXd weight;  // outputs x inputs
  Eigen::VectorXd bias;    // outputs
};

struct ModelShape {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden{128};
  std::size_t incident_classes = 0;
  std::size_t place_classes = 0;
  LossVariant variant = LossVariant::kClassNegative;

  // Incident head width: one extra output for the CE "no incident" class.
  std::size_t incident_outputs() const {
    return incident_classes + (variant == LossVariant::kCrossEntropy ? 1 : 0);
  }
};

/// Shared tanh MLP trunk followed by two linear heads (incident, place).
/// Also used as the gradient container, since gradients share its shape.
struct ModelParams {
  std::vector<DenseLayer> trunk;
  DenseLayer incident_head;
  DenseLayer place_head;

  std::size_t input_dim() const;
  std::size_t feature_dim() const;

  // All tensors in a fixed order: trunk layers (weight, bias) then the
  // incident head then the place head.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  std::size_t parameter_count() const;

  // Throws DataError on inconsistent shapes or non-finite entries.
  void validate() const;
};

ModelParams zeros(const ModelShape& shape);
ModelParams zeros_like(const ModelParams& params);

// Xavier-uniform weights, zero biases.
ModelParams init_xavier_uniform(const ModelShape& shape, std::uint64_t seed);

struct ForwardCache {
  // activations[0] is the input batch; activations[k] the k-th hidden output.
  std::vector<Eigen::MatrixXd> activations;
  Eigen::MatrixXd incident_logits;
  Eigen::MatrixXd place_logits;

  const Eigen::MatrixXd& trunk_features() const { return activations.back(); }
};

ForwardCache forward(const ModelParams& params, const Eigen::MatrixXd& embeddings);

/// Backpropagates logit gradients through both heads and the trunk. The
/// result has the same shapes as `params`.
ModelParams backward(const ModelParams& params, const ForwardCache& cache,
                     const Eigen::MatrixXd& grad_incident_logits,
                     const Eigen::MatrixXd& grad_place_logits);

struct Predictions {
  Eigen::MatrixXd incident;  // rows x incident classes (no-incident column dropped)
  Eigen::MatrixXd place;
};

// Per-class confidences: sigmoid for the class-negative model, softmax for
// the cross-entropy model.
Predictions predict(const ModelParams& params, LossVariant variant,
                    const Eigen::MatrixXd& embeddings);

}  // namespace incidents
