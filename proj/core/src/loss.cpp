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

#include "incidents/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "incidents/error.hpp"

namespace incidents {

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) noexcept {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double clamp_probability(double p) noexcept {
  return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

LossOutput cn_loss(std::span<const double> logits, std::span<const double> targets,
                   std::span<const double> weights) {
  if (logits.size() != targets.size() || logits.size() != weights.size()) {
    throw DataError("cn_loss: logits, targets and weights differ in length");
  }
  LossOutput out;
  out.grad_logits.assign(logits.size(), 0.0);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double w = weights[i];
    const double y = targets[i];
    if (w != 0.0 && w != 1.0) throw DataError("cn_loss: weights must be 0 or 1");
    if (y != 0.0 && y != 1.0) throw DataError("cn_loss: targets must be 0 or 1");
    if (w == 0.0) continue;
    const double x = logits[i];
    // -log s(x) = softplus(-x); -log(1 - s(x)) = softplus(x).
    out.value += y == 1.0 ? softplus(-x) : softplus(x);
    out.grad_logits[i] = sigmoid(x) - y;
    ++out.supervised_count;
  }
  return out;
}

LossOutput ce_loss(std::span<const double> logits, std::size_t target_class) {
  if (target_class >= logits.size()) {
    throw DataError("ce_loss: target class " + std::to_string(target_class) +
                    " out of range for " + std::to_string(logits.size()) + " outputs");
  }
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double x : logits) sum += std::exp(x - max);
  const double log_z = max + std::log(sum);
  LossOutput out;
  out.value = log_z - logits[target_class];
  out.grad_logits.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.grad_logits[i] = std::exp(logits[i] - log_z);
  }
  out.grad_logits[target_class] -= 1.0;
  out.supervised_count = 1;
  return out;
}

double combined_loss(const LossOutput& incident, const LossOutput& place) {
  return incident.value + place.value;
}

BatchLoss batch_cn_loss(const Eigen::MatrixXd& logits, std::span<const LabelView> labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
    throw DataError("batch_cn_loss: label count does not match batch rows");
  }
  const auto cols = static_cast<std::size_t>(logits.cols());
  BatchLoss out;
  out.grad_logits = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());
  if (labels.empty()) return out;
  const double scale = 1.0 / static_cast<double>(labels.size());
  std::vector<double> row(cols);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      row[c] = logits(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    const LossOutput l = cn_loss(row, labels[r].targets, labels[r].weights);
    out.value += l.value;
    out.supervised_count += l.supervised_count;
    for (std::size_t c = 0; c < cols; ++c) {
      out.grad_logits(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          l.grad_logits[c] * scale;
    }
  }
  out.value *= scale;
  return out;
}

BatchLoss batch_ce_loss(const Eigen::MatrixXd& logits,
                        std::span<const std::optional<std::size_t>> targets) {
  if (static_cast<std::size_t>(logits.rows()) != targets.size()) {
    throw DataError("batch_ce_loss: target count does not match batch rows");
  }
  const auto cols = static_cast<std::size_t>(logits.cols());
  BatchLoss out;
  out.grad_logits = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());
  if (targets.empty()) return out;
  const double scale = 1.0 / static_cast<double>(targets.size());
  std::vector<double> row(cols);
  for (std::size_t r = 0; r < targets.size(); ++r) {
    if (!targets[r]) continue;
    for (std::size_t c = 0; c < cols; ++c) {
      row[c] = logits(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    const LossOutput l = ce_loss(row, *targets[r]);
    out.value += l.value;
    out.supervised_count += 1;
    for (std::size_t c = 0; c < cols; ++c) {
      out.grad_logits(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          l.grad_logits[c] * scale;
    }
  }
  out.value *= scale;
  return out;
}

}  // namespace incidents
