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

#include "incidents/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "incidents/error.hpp"
#include "incidents/eval.hpp"

namespace incidents {
namespace {

void check_finite_grads(const ModelParams& grads) {
  for (const auto& t : grads.tensors()) {
    for (double g : t) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient; aborting Adam step");
    }
  }
}

struct Evaluation {
  double loss = 0.0;
  std::optional<double> incident_map;
  std::optional<double> place_map;
};

Evaluation evaluate(const ModelParams& params, std::span<const PartialLabelRecord> records,
                    const EmbeddingStore& store, const Taxonomy& taxonomy,
                    const TrainConfig& config) {
  Evaluation out;
  const Eigen::MatrixXd x = gather_embeddings(records, store);
  std::vector<std::size_t> rows(records.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const BatchTargets targets = batch_targets(records, rows, taxonomy, config);
  out.loss = batch_objective(params, x, targets, config.loss).value;

  const Predictions pred = predict(params, config.loss, x);
  const auto inc = make_scored_examples(records, pred.incident, Task::kIncident, taxonomy);
  const auto pl = make_scored_examples(records, pred.place, Task::kPlace, taxonomy);
  out.incident_map = detection_map(inc, Task::kIncident, taxonomy, true).mean_ap;
  out.place_map = detection_map(pl, Task::kPlace, taxonomy, true).mean_ap;
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be positive");
  if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
  if (min_epochs < 1) throw ConfigError("train.min_epochs must be at least 1");
  if (max_epochs < min_epochs) throw ConfigError("train.max_epochs must be >= train.min_epochs");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("adam betas must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
  if (patience < 1) throw ConfigError("train.patience must be at least 1");
  for (std::size_t h : hidden) {
    if (h == 0) throw ConfigError("train.hidden widths must be positive");
  }
}

nlohmann::json TrainConfig::to_json() const {
  return {{"loss", to_string(loss)},
          {"use_class_negatives", use_class_negatives},
          {"use_places_aug", use_places_aug},
          {"lr", lr},
          {"batch_size", batch_size},
          {"min_epochs", min_epochs},
          {"max_epochs", max_epochs},
          {"seed", seed},
          {"adam", {{"beta1", adam.beta1}, {"beta2", adam.beta2}, {"epsilon", adam.epsilon}}},
          {"hidden", hidden},
          {"activation", "tanh"},
          {"init", "xavier_uniform"},
          {"reduction", "batch_mean"},
          {"min_improvement", min_improvement},
          {"patience", patience}};
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
               const AdamConfig& config) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = state.first_moment.tensors();
  auto v = state.second_moment.tensors();
  if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size()) {
    throw DataError("adam_step: parameter and gradient structures differ");
  }
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (p[t].size() != g[t].size() || p[t].size() != m[t].size()) {
      throw DataError("adam_step: tensor shape mismatch");
    }
  }
  check_finite_grads(grads);

  ++state.step_;
  const double step = static_cast<double>(state.step_);
  const double bias1 = 1.0 - std::pow(config.beta1, step);
  const double bias2 = 1.0 - std::pow(config.beta2, step);
  for (std::size_t t = 0; t < p.size(); ++t) {
    for (std::size_t i = 0; i < p[t].size(); ++i) {
      const double gi = g[t][i];
      m[t][i] = config.beta1 * m[t][i] + (1.0 - config.beta1) * gi;
      v[t][i] = config.beta2 * v[t][i] + (1.0 - config.beta2) * gi * gi;
      const double m_hat = m[t][i] / bias1;
      const double v_hat = v[t][i] / bias2;
      p[t][i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

BatchTargets batch_targets(std::span<const PartialLabelRecord> records,
                           std::span<const std::size_t> rows, const Taxonomy& taxonomy,
                           const TrainConfig& config) {
  const std::size_t no_incident = taxonomy.size(Task::kIncident);
  BatchTargets t;
  t.incident.reserve(rows.size());
  t.place.reserve(rows.size());
  t.incident_ce.reserve(rows.size());
  t.place_ce.reserve(rows.size());
  for (std::size_t row : rows) {
    const auto& r = records[row];
    LabelView inc = label_view(r, Task::kIncident, taxonomy);
    if (!config.use_class_negatives && !r.incident_pos) {
      std::fill(inc.weights.begin(), inc.weights.end(), 0.0);
    }
    t.incident.push_back(std::move(inc));
    t.place.push_back(label_view(r, Task::kPlace, taxonomy));

    std::optional<std::size_t> ce_target;
    if (r.incident_pos) {
      ce_target = *r.incident_pos;
    } else if (r.source == RecordSource::kPlacesAug) {
      ce_target = no_incident;
    } else if (config.use_class_negatives && !r.incident_neg.empty()) {
      ce_target = no_incident;
    }
    t.incident_ce.push_back(ce_target);
    t.place_ce.push_back(r.place_pos);
  }
  return t;
}

BatchObjective batch_objective(const ModelParams& params, const Eigen::MatrixXd& embeddings,
                               const BatchTargets& targets, LossVariant variant) {
  const ForwardCache cache = forward(params, embeddings);
  BatchObjective out;
  if (variant == LossVariant::kClassNegative) {
    out.incident = batch_cn_loss(cache.incident_logits, targets.incident);
    out.place = batch_cn_loss(cache.place_logits, targets.place);
  } else {
    out.incident = batch_ce_loss(cache.incident_logits, targets.incident_ce);
    out.place = batch_ce_loss(cache.place_logits, targets.place_ce);
  }
  out.value = out.incident.value + out.place.value;
  out.grads = backward(params, cache, out.incident.grad_logits, out.place.grad_logits);
  return out;
}

nlohmann::json EpochLog::to_json(bool include_wall_time) const {
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json j = {{"epoch", epoch},
                      {"train_loss", train_loss},
                      {"val_loss", opt(val_loss)},
                      {"val_incident_map", opt(val_incident_map)},
                      {"val_place_map", opt(val_place_map)}};
  if (include_wall_time) j["wall_time_s"] = wall_time_s;
  return j;
}

TrainResult train(std::span<const PartialLabelRecord> train_records,
                  std::span<const PartialLabelRecord> val_records, const EmbeddingStore& store,
                  const Taxonomy& taxonomy, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  std::vector<PartialLabelRecord> records;
  records.reserve(train_records.size());
  for (const auto& r : train_records) {
    if (!config.use_places_aug && r.source == RecordSource::kPlacesAug) continue;
    records.push_back(r);
  }
  if (records.empty()) throw DataError("empty training set");
  check_embedding_indices(records, store);
  check_embedding_indices(val_records, store);

  ModelShape shape;
  shape.input_dim = store.dim();
  shape.hidden = config.hidden;
  shape.incident_classes = taxonomy.size(Task::kIncident);
  shape.place_classes = taxonomy.size(Task::kPlace);
  shape.variant = config.loss;

  TrainResult result;
  result.params = init_xavier_uniform(shape, config.seed);
  AdamState adam(result.params);

  double best_map = -1.0;
  int stale = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    BatchIterator batches(records, store, taxonomy, config.batch_size, config.seed,
                          static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;
    std::size_t rows_seen = 0;
    while (auto batch = batches.next()) {
      const BatchTargets targets =
          batch_targets(records, batch->record_indices, taxonomy, config);
      BatchObjective obj = batch_objective(result.params, batch->embeddings, targets, config.loss);
      if (!std::isfinite(obj.value)) throw NumericError("non-finite training loss");

      if (config.loss == LossVariant::kClassNegative) {
        for (std::size_t i = 0; i < batch->size(); ++i) {
          if (records[batch->record_indices[i]].source != RecordSource::kPlacesAug) continue;
          if ((obj.incident.grad_logits.row(static_cast<Eigen::Index>(i)).array() != 0.0).any()) {
            throw NumericError("places_aug row " + records[batch->record_indices[i]].id +
                               " produced an incident-head gradient");
          }
          ++result.places_aug_rows_checked;
        }
      }

      adam_step(result.params, obj.grads, adam, config.lr, config.adam);
      loss_sum += obj.value * static_cast<double>(batch->size());
      rows_seen += batch->size();
      ++result.batches;
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / static_cast<double>(rows_seen);
    if (!val_records.empty()) {
      const Evaluation ev = evaluate(result.params, val_records, store, taxonomy, config);
      log.val_loss = ev.loss;
      log.val_incident_map = ev.incident_map;
      log.val_place_map = ev.place_map;
    }
    log.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.epochs.push_back(log);
    if (on_epoch) on_epoch(log);

    if (log.val_incident_map) {
      if (*log.val_incident_map > best_map + config.min_improvement) {
        best_map = *log.val_incident_map;
        stale = 0;
      } else {
        ++stale;
      }
      if (epoch >= config.min_epochs && stale >= config.patience) {
        result.converged = true;
        break;
      }
    }
  }
  return result;
}

Predictions predict_records(const ModelParams& params, LossVariant variant,
                            std::span<const PartialLabelRecord> records,
                            const EmbeddingStore& store) {
  return predict(params, variant, gather_embeddings(records, store));
}

}  // namespace incidents
