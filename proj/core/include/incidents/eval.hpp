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

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "incidents/dataset.hpp"
#include "incidents/taxonomy.hpp"

namespace incidents {

/// One test example for one task: confidences in [0, 1] per class, and the
/// known-label mask (`label.weights`) with targets.
struct ScoredExample {
  std::string id;
  RecordSource source = RecordSource::kDataset;
  std::vector<double> confidences;
  LabelView label;
};

// Pairs records with rows of a confidence matrix, using eval_label_view.
std::vector<ScoredExample> make_scored_examples(std::span<const PartialLabelRecord> records,
                                                const Eigen::MatrixXd& confidences, Task task,
                                                const Taxonomy& taxonomy);

struct RankedItem {
  double score = 0.0;
  bool positive = false;
  // Tie-break key: equal scores rank by ascending key.
  std::size_t key = 0;
};

/// Non-interpolated AP: the mean, over positives, of precision at each
/// positive's rank after sorting by descending score. nullopt when there is
/// no positive.
std::optional<double> average_precision(std::span<const RankedItem> items);

// Convenience form; ties break by position in the input.
std::optional<double> average_precision(std::span<const double> scores,
                                        std::span<const char> positive);

struct ClassAp {
  std::optional<double> ap;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct ApResult {
  std::vector<ClassAp> per_class;
  // Mean over classes whose AP is defined.
  std::optional<double> mean_ap;
  // Classes without any known positive, excluded from the mean.
  std::vector<std::size_t> undefined_classes;
};

/// Partial-label detection mAP. Class c is scored on the examples whose
/// label for c is known: its positives, its class-negatives, positives of
/// other classes, and (iff `include_places_aug`) places_aug images. Examples
/// with an unknown label for c are left out of c's pool. When the flag is
/// false, places_aug examples are dropped from every pool.
ApResult detection_map(std::span<const ScoredExample> examples, Task task,
                       const Taxonomy& taxonomy, bool include_places_aug);

/// Fraction of examples whose positive class is among the k most confident,
/// ties broken by ascending class index. Every example must have a positive;
/// throws DataError otherwise and ConfigError unless 1 <= k <= classes.
double topk_accuracy(std::span<const ScoredExample> examples, std::size_t k);

inline constexpr std::size_t kHistogramBins = 20;

struct HardNegativeReport {
  double threshold = 0.5;
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  // 20 uniform bins on [0, 1]; 1.0 falls in the last bin.
  std::array<std::size_t, kHistogramBins> histogram{};
};

// `confidences` are the probed-class confidences of known negatives.
HardNegativeReport hard_negative_report(std::span<const double> confidences,
                                        double threshold = 0.5);

nlohmann::json to_json(const ApResult& result, Task task, const Taxonomy& taxonomy);
nlohmann::json to_json(const HardNegativeReport& report);
void write_ap_csv(const ApResult& result, Task task, const Taxonomy& taxonomy,
                  std::ostream& out);

}  // namespace incidents
