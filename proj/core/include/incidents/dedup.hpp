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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "incidents/dataset.hpp"
#include "incidents/embeddings.hpp"

namespace incidents {

enum class DistanceMetric { kCosine, kEuclidean };
enum class DedupStrategy { kBruteForce, kGrid };

const char* to_string(DistanceMetric metric) noexcept;
const char* to_string(DedupStrategy strategy) noexcept;
DistanceMetric parse_distance_metric(std::string_view text);
DedupStrategy parse_dedup_strategy(std::string_view text);

struct DedupConfig {
  double radius = 0.1;
  DistanceMetric metric = DistanceMetric::kCosine;
  DedupStrategy strategy = DedupStrategy::kBruteForce;
  std::size_t threads = 1;

  void validate() const;
};

// Cosine distance is 1 - cos(a, b); throws DataError for a zero vector.
double embedding_distance(std::span<const float> a, std::span<const float> b,
                          DistanceMetric metric);

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

/// Clusters are the connected components of the graph linking every pair at
/// distance <= radius. Cluster ids are dense and ordered by representative,
/// the member with the lexicographically smallest id, so the result does not
/// depend on input order.
struct ClusterAssignment {
  std::vector<std::string> ids;
  std::vector<std::size_t> cluster_of;         // parallel to ids
  std::vector<std::string> representatives;    // per cluster

  std::size_t cluster_count() const { return representatives.size(); }
  bool is_representative(std::size_t i) const {
    return representatives.at(cluster_of.at(i)) == ids.at(i);
  }
};

// Row i of `store` belongs to ids[i].
ClusterAssignment dedup(const EmbeddingStore& store, std::span<const std::string> ids,
                        const DedupConfig& config);

// Uses each record's embedding_index row.
ClusterAssignment dedup_records(std::span<const PartialLabelRecord> records,
                                const EmbeddingStore& store, const DedupConfig& config);

/// One record per cluster (its representative), sorted by id. Throws
/// DataError if a record is missing from the assignment or points at an
/// unknown cluster.
std::vector<PartialLabelRecord> keep_representatives(std::span<const PartialLabelRecord> records,
                                                     const ClusterAssignment& assignment);

// id,cluster_id,is_representative
void write_cluster_csv(const ClusterAssignment& assignment, std::ostream& out);

}  // namespace incidents
