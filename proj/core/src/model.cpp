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

#include "incidents/model.hpp"

#include <cmath>
#include <string>

#include "incidents/error.hpp"
#include "incidents/loss.hpp"
#include "incidents/random.hpp"

namespace incidents {
namespace {

DenseLayer zero_layer(std::size_t outputs, std::size_t inputs) {
  return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(outputs),
                                static_cast<Eigen::Index>(inputs)),
          Eigen::VectorXd::Zero(static_cast<Eigen::Index>(outputs))};
}

DenseLayer zero_layer_like(const DenseLayer& layer) {
  return {Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
          Eigen::VectorXd::Zero(layer.bias.size())};
}

void xavier_fill(DenseLayer& layer, Rng& rng) {
  const double fan_in = static_cast<double>(layer.weight.cols());
  const double fan_out = static_cast<double>(layer.weight.rows());
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  // Row-major fill order keeps initialization independent of Eigen storage.
  for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      layer.weight(r, c) = rng.uniform(-limit, limit);
    }
  }
  layer.bias.setZero();
}

Eigen::MatrixXd affine(const Eigen::MatrixXd& input, const DenseLayer& layer) {
  Eigen::MatrixXd out = input * layer.weight.transpose();
  out.rowwise() += layer.bias.transpose();
  return out;
}

void check_layer(const DenseLayer& layer, std::size_t inputs, const char* what) {
  if (static_cast<std::size_t>(layer.weight.cols()) != inputs ||
      layer.bias.size() != layer.weight.rows()) {
    throw DataError(std::string("model shape mismatch in ") + what);
  }
  if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
    throw DataError(std::string("non-finite parameter in ") + what);
  }
}

}  // namespace

const char* to_string(LossVariant variant) noexcept {
  return variant == LossVariant::kClassNegative ? "cn" : "ce";
}

LossVariant parse_loss_variant(std::string_view text) {
  if (text == "cn") return LossVariant::kClassNegative;
  if (text == "ce") return LossVariant::kCrossEntropy;
  throw ConfigError("unknown loss variant '" + std::string(text) + "' (want cn or ce)");
}

std::size_t ModelParams::input_dim() const {
  if (!trunk.empty()) return static_cast<std::size_t>(trunk.front().weight.cols());
  return static_cast<std::size_t>(incident_head.weight.cols());
}

std::size_t ModelParams::feature_dim() const {
  if (!trunk.empty()) return static_cast<std::size_t>(trunk.back().weight.rows());
  return static_cast<std::size_t>(incident_head.weight.cols());
}

std::vector<std::span<double>> ModelParams::tensors() {
  std::vector<std::span<double>> out;
  const auto add = [&out](DenseLayer& l) {
    out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
    out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  };
  for (auto& layer : trunk) add(layer);
  add(incident_head);
  add(place_head);
  return out;
}

std::vector<std::span<const double>> ModelParams::tensors() const {
  std::vector<std::span<const double>> out;
  const auto add = [&out](const DenseLayer& l) {
    out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
    out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  };
  for (const auto& layer : trunk) add(layer);
  add(incident_head);
  add(place_head);
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.size();
  return n;
}

void ModelParams::validate() const {
  std::size_t width = input_dim();
  for (std::size_t i = 0; i < trunk.size(); ++i) {
    check_layer(trunk[i], width, "trunk layer");
    width = static_cast<std::size_t>(trunk[i].weight.rows());
  }
  check_layer(incident_head, width, "incident head");
  check_layer(place_head, width, "place head");
}

ModelParams zeros(const ModelShape& shape) {
  if (shape.input_dim == 0) throw ConfigError("model input dim must be positive");
  ModelParams p;
  std::size_t width = shape.input_dim;
  for (std::size_t h : shape.hidden) {
    if (h == 0) throw ConfigError("hidden layer width must be positive");
    p.trunk.push_back(zero_layer(h, width));
    width = h;
  }
  p.incident_head = zero_layer(shape.incident_outputs(), width);
  p.place_head = zero_layer(shape.place_classes, width);
  return p;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams p;
  for (const auto& layer : params.trunk) p.trunk.push_back(zero_layer_like(layer));
  p.incident_head = zero_layer_like(params.incident_head);
  p.place_head = zero_layer_like(params.place_head);
  return p;
}

ModelParams init_xavier_uniform(const ModelShape& shape, std::uint64_t seed) {
  ModelParams p = zeros(shape);
  Rng rng(derive_seed(seed, 0x696e6974ULL));
  for (auto& layer : p.trunk) xavier_fill(layer, rng);
  xavier_fill(p.incident_head, rng);
  xavier_fill(p.place_head, rng);
  return p;
}

ForwardCache forward(const ModelParams& params, const Eigen::MatrixXd& embeddings) {
  if (static_cast<std::size_t>(embeddings.cols()) != params.input_dim()) {
    throw DataError("forward: embedding dim " + std::to_string(embeddings.cols()) +
                    " does not match model input dim " + std::to_string(params.input_dim()));
  }
  ForwardCache cache;
  cache.activations.reserve(params.trunk.size() + 1);
  cache.activations.push_back(embeddings);
  for (const auto& layer : params.trunk) {
    cache.activations.push_back(affine(cache.activations.back(), layer).array().tanh().matrix());
  }
  cache.incident_logits = affine(cache.trunk_features(), params.incident_head);
  cache.place_logits = affine(cache.trunk_features(), params.place_head);
  return cache;
}

ModelParams backward(const ModelParams& params, const ForwardCache& cache,
                     const Eigen::MatrixXd& grad_incident_logits,
                     const Eigen::MatrixXd& grad_place_logits) {
  if (grad_incident_logits.rows() != cache.incident_logits.rows() ||
      grad_incident_logits.cols() != cache.incident_logits.cols() ||
      grad_place_logits.rows() != cache.place_logits.rows() ||
      grad_place_logits.cols() != cache.place_logits.cols()) {
    throw DataError("backward: logit gradient shape mismatch");
  }
  if (cache.activations.size() != params.trunk.size() + 1) {
    throw DataError("backward: cache does not match model depth");
  }
  ModelParams grads = zeros_like(params);
  const Eigen::MatrixXd& features = cache.trunk_features();

  grads.incident_head.weight = grad_incident_logits.transpose() * features;
  grads.incident_head.bias = grad_incident_logits.colwise().sum().transpose();
  grads.place_head.weight = grad_place_logits.transpose() * features;
  grads.place_head.bias = grad_place_logits.colwise().sum().transpose();

  Eigen::MatrixXd upstream = grad_incident_logits * params.incident_head.weight +
                             grad_place_logits * params.place_head.weight;
  for (std::size_t k = params.trunk.size(); k-- > 0;) {
    const Eigen::MatrixXd& out = cache.activations[k + 1];
    const Eigen::MatrixXd pre =
        (upstream.array() * (1.0 - out.array().square())).matrix();
    grads.trunk[k].weight = pre.transpose() * cache.activations[k];
    grads.trunk[k].bias = pre.colwise().sum().transpose();
    if (k > 0) upstream = pre * params.trunk[k].weight;
  }
  return grads;
}

Predictions predict(const ModelParams& params, LossVariant variant,
                    const Eigen::MatrixXd& embeddings) {
  const ForwardCache cache = forward(params, embeddings);
  Predictions out;
  if (variant == LossVariant::kClassNegative) {
    out.incident = cache.incident_logits.unaryExpr([](double x) { return sigmoid(x); });
    out.place = cache.place_logits.unaryExpr([](double x) { return sigmoid(x); });
    return out;
  }
  const auto row_softmax = [](const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd probs(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      const Eigen::RowVectorXd shifted = logits.row(r).array() - logits.row(r).maxCoeff();
      const Eigen::RowVectorXd e = shifted.array().exp();
      probs.row(r) = e / e.sum();
    }
    return probs;
  };
  const Eigen::MatrixXd inc = row_softmax(cache.incident_logits);
  out.incident = inc.leftCols(inc.cols() - 1);
  out.place = row_softmax(cache.place_logits);
  return out;
}

}  // namespace incidents
