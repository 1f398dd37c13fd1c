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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "incidents/civil_time.hpp"
#include "incidents/embeddings.hpp"
#include "incidents/geo.hpp"
#include "incidents/taxonomy.hpp"

namespace incidents {

enum class RecordSource { kDataset, kPlacesAug, kStream };

const char* to_string(RecordSource source) noexcept;
RecordSource parse_record_source(std::string_view text);

/// One image with partial labels. Category fields hold indices into the
/// taxonomy the record was resolved against.
///
/// Invariants (checked by validate_record): at most one positive per task, the
/// positive never appears among that task's negatives, negatives are sorted
/// and unique, and places_aug records carry no incident positive.
struct PartialLabelRecord {
  std::string id;
  std::uint64_t embedding_index = 0;
  std::optional<std::size_t> incident_pos;
  std::vector<std::size_t> incident_neg;
  std::optional<std::size_t> place_pos;
  std::vector<std::size_t> place_neg;
  RecordSource source = RecordSource::kDataset;
  std::optional<GeoPoint> location;
  std::optional<Timestamp> timestamp;

  const std::optional<std::size_t>& positive(Task task) const {
    return task == Task::kIncident ? incident_pos : place_pos;
  }
  const std::vector<std::size_t>& negatives(Task task) const {
    return task == Task::kIncident ? incident_neg : place_neg;
  }
};

void validate_record(const PartialLabelRecord& record, const Taxonomy& taxonomy);

// JSON-lines manifest. Throws DataError with "source:line:" context for
// malformed lines, unknown categories, duplicate ids and multiple positives.
std::vector<PartialLabelRecord> read_manifest(std::istream& in, const Taxonomy& taxonomy,
                                              const std::string& source = "<stream>");
std::vector<PartialLabelRecord> load_manifest(const std::filesystem::path& path,
                                              const Taxonomy& taxonomy);
void write_manifest(std::span<const PartialLabelRecord> records, const Taxonomy& taxonomy,
                    std::ostream& out);
void write_manifest(std::span<const PartialLabelRecord> records, const Taxonomy& taxonomy,
                    const std::filesystem::path& path);

// Checks every embedding_index against the store.
void check_embedding_indices(std::span<const PartialLabelRecord> records,
                             const EmbeddingStore& store);

/// Per-task supervision for one record. A loss must ignore targets[i]
/// wherever weights[i] == 0.
struct LabelView {
  std::vector<double> targets;
  std::vector<double> weights;

  std::size_t supervised() const;
};

/// Training-time label semantics:
///  - positive present: one-hot targets, all weights 1 (single-label
///    assumption makes every other class a known negative);
///  - negatives only: zero targets, weights mark the negative set;
///  - places_aug record on the incident task, or no labels at all: all
///    weights 0.
LabelView label_view(const PartialLabelRecord& record, Task task, const Taxonomy& taxonomy);

// Evaluation-time variant: identical to label_view except that a places_aug
// record is a known negative for every incident class.
LabelView eval_label_view(const PartialLabelRecord& record, Task task,
                          const Taxonomy& taxonomy);

struct SplitRatios {
  double train = 0.90;
  double val = 0.05;
  double test = 0.05;
};

struct SplitManifest {
  // Each list sorted by id.
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

/// Deterministic partition. Records are ranked by a stable 64-bit hash of
/// (id, seed) and the ranking is cut into exact largest-remainder counts, so
/// a record's split depends only on its id, the seed, the ratios and the set
/// of ids. Throws ConfigError unless ratios are non-negative and sum to 1
/// within 1e-9.
SplitManifest split(std::span<const PartialLabelRecord> records, std::uint64_t seed,
                    const SplitRatios& ratios = {});

// Records whose ids appear in `ids`, in input order.
std::vector<PartialLabelRecord> select_records(std::span<const PartialLabelRecord> records,
                                               std::span<const std::string> ids);

// Seeded permutation of [0, n) for one epoch.
std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed,
                                           std::uint64_t epoch);

struct Batch {
  std::vector<std::size_t> record_indices;
  Eigen::MatrixXd embeddings;  // rows = batch, cols = dim
  std::vector<LabelView> incident;
  std::vector<LabelView> place;

  std::size_t size() const { return record_indices.size(); }
};

/// Walks one epoch of records in a seeded order, yielding batches of
/// `batch_size` (the last may be short). Holds references to its inputs.
class BatchIterator {
 public:
  BatchIterator(std::span<const PartialLabelRecord> records, const EmbeddingStore& store,
                const Taxonomy& taxonomy, std::size_t batch_size, std::uint64_t seed,
                std::uint64_t epoch);

  std::optional<Batch> next();

  const std::vector<std::size_t>& order() const { return order_; }

 private:
  std::span<const PartialLabelRecord> records_;
  const EmbeddingStore& store_;
  const Taxonomy& taxonomy_;
  std::size_t batch_size_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

// Gathers record embeddings into a dense matrix in record order.
Eigen::MatrixXd gather_embeddings(std::span<const PartialLabelRecord> records,
                                  const EmbeddingStore& store);

}  // namespace incidents
