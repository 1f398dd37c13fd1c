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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "incidents/dataset.hpp"
#include "incidents/embeddings.hpp"
#include "incidents/loss.hpp"
#include "incidents/model.hpp"
#include "incidents/taxonomy.hpp"

namespace incidents {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  LossVariant loss = LossVariant::kClassNegative;
  bool use_class_negatives = true;
  bool use_places_aug = true;
  double lr = 1e-4;
  std::size_t batch_size = 256;
  int min_epochs = 10;
  int max_epochs = 30;
  std::uint64_t seed = 0;
  AdamConfig adam;
  std::vector<std::size_t> hidden{128};
  // Stop once validation incident mAP has not improved by more than
  // `min_improvement` for `patience` epochs, after `min_epochs`.
  double min_improvement = 1e-4;
  int patience = 3;

  // Throws ConfigError.
  void validate() const;
  nlohmann::json to_json() const;
};

class AdamState {
 public:
  explicit AdamState(const ModelParams& params)
      : first_moment(zeros_like(params)), second_moment(zeros_like(params)) {}

  std::uint64_t step() const { return step_; }

  ModelParams first_moment;
  ModelParams second_moment;

 private:
  friend void adam_step(ModelParams&, const ModelParams&, AdamState&, double,
                        const AdamConfig&);
  std::uint64_t step_ = 0;
};

/// One bias-corrected Adam update. A non-finite gradient raises NumericError
/// before anything is modified.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
               const AdamConfig& config = {});

// Per-row supervision after applying the ablation flags.
struct BatchTargets {
  std::vector<LabelView> incident;                      // class-negative variant
  std::vector<std::optional<std::size_t>> incident_ce;  // cross-entropy variant
  std::vector<LabelView> place;
  std::vector<std::optional<std::size_t>> place_ce;
};

BatchTargets batch_targets(std::span<const PartialLabelRecord> records,
                           std::span<const std::size_t> rows, const Taxonomy& taxonomy,
                           const TrainConfig& config);

struct BatchObjective {
  double value = 0.0;  // incident + place, batch-mean reduced
  BatchLoss incident;
  BatchLoss place;
  ModelParams grads;
};

// Forward, both losses and backward for one batch of records.
BatchObjective batch_objective(const ModelParams& params, const Eigen::MatrixXd& embeddings,
                               const BatchTargets& targets, LossVariant variant);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  std::optional<double> val_loss;
  std::optional<double> val_incident_map;
  std::optional<double> val_place_map;
  double wall_time_s = 0.0;

  nlohmann::json to_json(bool include_wall_time = true) const;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> epochs;
  bool converged = false;
  std::size_t batches = 0;
  // Rows from places_aug images whose incident-logit gradient was checked to
  // be exactly zero (class-negative variant only).
  std::size_t places_aug_rows_checked = 0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Trains from Xavier-initialized parameters with constant-rate Adam.
/// Deterministic for fixed inputs, config and platform. Throws DataError on
/// an empty training set or a dimension mismatch.
TrainResult train(std::span<const PartialLabelRecord> train_records,
                  std::span<const PartialLabelRecord> val_records, const EmbeddingStore& store,
                  const Taxonomy& taxonomy, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

Predictions predict_records(const ModelParams& params, LossVariant variant,
                            std::span<const PartialLabelRecord> records,
                            const EmbeddingStore& store);

}  // namespace incidents
