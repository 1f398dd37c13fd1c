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

#include "incidents/eval.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "incidents/error.hpp"

namespace incidents {

std::vector<ScoredExample> make_scored_examples(std::span<const PartialLabelRecord> records,
                                                const Eigen::MatrixXd& confidences, Task task,
                                                const Taxonomy& taxonomy) {
  if (static_cast<std::size_t>(confidences.rows()) != records.size() ||
      static_cast<std::size_t>(confidences.cols()) != taxonomy.size(task)) {
    throw DataError("confidence matrix does not match records and taxonomy");
  }
  std::vector<ScoredExample> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    ScoredExample ex;
    ex.id = records[i].id;
    ex.source = records[i].source;
    ex.confidences.resize(taxonomy.size(task));
    for (std::size_t c = 0; c < ex.confidences.size(); ++c) {
      ex.confidences[c] = confidences(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    }
    ex.label = eval_label_view(records[i], task, taxonomy);
    out.push_back(std::move(ex));
  }
  return out;
}

std::optional<double> average_precision(std::span<const RankedItem> items) {
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&items](std::size_t a, std::size_t b) {
    if (items[a].score != items[b].score) return items[a].score > items[b].score;
    return items[a].key < items[b].key;
  });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (!items[order[rank]].positive) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  if (hits == 0) return std::nullopt;
  return sum / static_cast<double>(hits);
}

std::optional<double> average_precision(std::span<const double> scores,
                                        std::span<const char> positive) {
  if (scores.size() != positive.size()) {
    throw DataError("average_precision: scores and labels differ in length");
  }
  std::vector<RankedItem> items(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) items[i] = {scores[i], positive[i] != 0, i};
  return average_precision(items);
}

ApResult detection_map(std::span<const ScoredExample> examples, Task task,
                       const Taxonomy& taxonomy, bool include_places_aug) {
  const std::size_t n_classes = taxonomy.size(task);
  // Tie-break keys follow ascending example id.
  std::vector<std::size_t> by_id(examples.size());
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(),
            [&examples](std::size_t a, std::size_t b) { return examples[a].id < examples[b].id; });
  std::vector<std::size_t> key(examples.size());
  for (std::size_t rank = 0; rank < by_id.size(); ++rank) key[by_id[rank]] = rank;

  ApResult result;
  result.per_class.resize(n_classes);
  double sum = 0.0;
  std::size_t defined = 0;
  std::vector<RankedItem> pool;
  for (std::size_t c = 0; c < n_classes; ++c) {
    pool.clear();
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const auto& ex = examples[i];
      if (ex.confidences.size() != n_classes || ex.label.weights.size() != n_classes) {
        throw DataError("scored example " + ex.id + " has the wrong number of classes");
      }
      if (ex.source == RecordSource::kPlacesAug && !include_places_aug) continue;
      if (ex.label.weights[c] == 0.0) continue;
      const bool positive = ex.label.targets[c] == 1.0;
      pool.push_back({ex.confidences[c], positive, key[i]});
      ++(positive ? result.per_class[c].positives : result.per_class[c].negatives);
    }
    result.per_class[c].ap = average_precision(pool);
    if (result.per_class[c].ap) {
      sum += *result.per_class[c].ap;
      ++defined;
    } else {
      result.undefined_classes.push_back(c);
    }
  }
  if (defined > 0) result.mean_ap = sum / static_cast<double>(defined);
  return result;
}

double topk_accuracy(std::span<const ScoredExample> examples, std::size_t k) {
  if (examples.empty()) throw DataError("topk_accuracy: no examples");
  std::size_t hits = 0;
  for (const auto& ex : examples) {
    const std::size_t n = ex.confidences.size();
    if (k < 1 || k > n) {
      throw ConfigError("top-k: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
    const auto it = std::find(ex.label.targets.begin(), ex.label.targets.end(), 1.0);
    if (it == ex.label.targets.end()) {
      throw DataError("topk_accuracy: example " + ex.id + " has no positive class");
    }
    const auto truth = static_cast<std::size_t>(it - ex.label.targets.begin());
    const double s = ex.confidences[truth];
    std::size_t ahead = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (ex.confidences[j] > s || (ex.confidences[j] == s && j < truth)) ++ahead;
    }
    if (ahead < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

HardNegativeReport hard_negative_report(std::span<const double> confidences, double threshold) {
  if (confidences.empty()) throw DataError("hard_negative_report: empty set");
  HardNegativeReport r;
  r.threshold = threshold;
  r.count = confidences.size();
  for (double c : confidences) {
    if (!(c >= 0.0 && c <= 1.0)) throw DataError("confidence outside [0, 1]");
    if (c < threshold) ++r.correct;
    const auto bin = std::min(kHistogramBins - 1,
                              static_cast<std::size_t>(c * static_cast<double>(kHistogramBins)));
    ++r.histogram[bin];
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.count);
  return r;
}

nlohmann::json to_json(const ApResult& result, Task task, const Taxonomy& taxonomy) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < result.per_class.size(); ++c) {
    const auto& pc = result.per_class[c];
    classes.push_back({{"class", taxonomy.name(task, c)},
                       {"ap", pc.ap ? nlohmann::json(*pc.ap) : nlohmann::json(nullptr)},
                       {"positives", pc.positives},
                       {"negatives", pc.negatives}});
  }
  nlohmann::json undefined = nlohmann::json::array();
  for (std::size_t c : result.undefined_classes) undefined.push_back(taxonomy.name(task, c));
  return {{"task", to_string(task)},
          {"map", result.mean_ap ? nlohmann::json(*result.mean_ap) : nlohmann::json(nullptr)},
          {"classes", classes},
          {"excluded_classes", undefined}};
}

nlohmann::json to_json(const HardNegativeReport& report) {
  return {{"threshold", report.threshold},
          {"count", report.count},
          {"correct", report.correct},
          {"accuracy", report.accuracy},
          {"histogram", report.histogram}};
}

void write_ap_csv(const ApResult& result, Task task, const Taxonomy& taxonomy,
                  std::ostream& out) {
  out << "task,class,ap,positives,negatives\n";
  for (std::size_t c = 0; c < result.per_class.size(); ++c) {
    const auto& pc = result.per_class[c];
    out << to_string(task) << ",\"" << taxonomy.name(task, c) << "\",";
    if (pc.ap) out << *pc.ap;
    out << ',' << pc.positives << ',' << pc.negatives << '\n';
  }
}

}  // namespace incidents
