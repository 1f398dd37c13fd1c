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

#include "incidents/dedup.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>
#include <unordered_map>

#include "incidents/error.hpp"

namespace incidents {
namespace {

using Rows = std::vector<std::span<const float>>;
using Edge = std::pair<std::size_t, std::size_t>;

void check_rows(const Rows& rows, DistanceMetric metric) {
  if (metric != DistanceMetric::kCosine) return;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::all_of(rows[i].begin(), rows[i].end(), [](float v) { return v == 0.0f; })) {
      throw DataError("zero vector at row " + std::to_string(i) + " under cosine distance");
    }
  }
}

// Splits [0, n) into `threads` contiguous blocks of outer indices, evaluates
// each block independently, and concatenates results in block order.
template <typename PairsInBlock>
std::vector<Edge> parallel_edges(std::size_t n, std::size_t threads, PairsInBlock pairs) {
  threads = std::max<std::size_t>(1, std::min(threads, n == 0 ? 1 : n));
  std::vector<std::vector<Edge>> parts(threads);
  const auto work = [&](std::size_t t) {
    const std::size_t begin = n * t / threads;
    const std::size_t end = n * (t + 1) / threads;
    pairs(begin, end, parts[t]);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::vector<Edge> edges;
  for (auto& p : parts) edges.insert(edges.end(), p.begin(), p.end());
  return edges;
}

std::vector<Edge> brute_force_edges(const Rows& rows, const DedupConfig& config) {
  const std::size_t n = rows.size();
  return parallel_edges(n, config.threads, [&](std::size_t begin, std::size_t end, auto& out) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (embedding_distance(rows[i], rows[j], config.metric) <= config.radius) {
          out.emplace_back(i, j);
        }
      }
    }
  });
}

// Candidate generation by coarse quantization of a few high-variance
// coordinates. Working vectors are unit-normalized for cosine, where
// 1 - cos <= r implies |u - v| <= sqrt(2r). Any pair within that Euclidean
// bound differs by at most the bound in every coordinate, so it lands in the
// same or an adjacent cell along each quantized axis. Candidates are then
// confirmed with the exact distance used by brute force.
std::vector<Edge> grid_edges(const Rows& rows, const DedupConfig& config) {
  const std::size_t n = rows.size();
  if (n < 2) return {};
  const std::size_t dim = rows[0].size();

  std::vector<std::vector<double>> work(n, std::vector<double>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 1.0;
    if (config.metric == DistanceMetric::kCosine) {
      norm = 0.0;
      for (float v : rows[i]) norm += static_cast<double>(v) * v;
      norm = std::sqrt(norm);
    }
    for (std::size_t j = 0; j < dim; ++j) work[i][j] = rows[i][j] / norm;
  }
  double bound = config.metric == DistanceMetric::kCosine ? std::sqrt(2.0 * config.radius)
                                                          : config.radius;
  bound = bound * (1.0 + 1e-6) + 1e-12;

  // Pick up to three axes with the largest spread.
  std::vector<std::pair<double, std::size_t>> spread;
  for (std::size_t j = 0; j < dim; ++j) {
    double lo = work[0][j], hi = work[0][j];
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, work[i][j]);
      hi = std::max(hi, work[i][j]);
    }
    spread.emplace_back(hi - lo, j);
  }
  std::sort(spread.begin(), spread.end(),
            [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  const std::size_t axes = std::min<std::size_t>(3, dim);

  using Cell = std::array<std::int64_t, 3>;
  std::map<Cell, std::vector<std::size_t>> cells;
  std::vector<Cell> cell_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    Cell c{0, 0, 0};
    for (std::size_t a = 0; a < axes; ++a) {
      c[a] = static_cast<std::int64_t>(std::floor(work[i][spread[a].second] / bound));
    }
    cell_of[i] = c;
    cells[c].push_back(i);
  }

  return parallel_edges(n, config.threads, [&](std::size_t begin, std::size_t end, auto& out) {
    const int reach[3] = {axes > 0 ? 1 : 0, axes > 1 ? 1 : 0, axes > 2 ? 1 : 0};
    for (std::size_t i = begin; i < end; ++i) {
      for (int d0 = -reach[0]; d0 <= reach[0]; ++d0) {
        for (int d1 = -reach[1]; d1 <= reach[1]; ++d1) {
          for (int d2 = -reach[2]; d2 <= reach[2]; ++d2) {
            const Cell c{cell_of[i][0] + d0, cell_of[i][1] + d1, cell_of[i][2] + d2};
            const auto it = cells.find(c);
            if (it == cells.end()) continue;
            for (std::size_t j : it->second) {
              if (j <= i) continue;
              if (embedding_distance(rows[i], rows[j], config.metric) <= config.radius) {
                out.emplace_back(i, j);
              }
            }
          }
        }
      }
    }
  });
}

ClusterAssignment cluster(const Rows& rows, std::span<const std::string> ids,
                          const DedupConfig& config) {
  config.validate();
  if (rows.size() != ids.size()) throw DataError("dedup: ids and rows differ in count");
  check_rows(rows, config.metric);

  const auto edges = config.strategy == DedupStrategy::kBruteForce ? brute_force_edges(rows, config)
                                                                    : grid_edges(rows, config);
  const std::size_t n = rows.size();
  DisjointSets sets(n);
  for (const auto& [a, b] : edges) sets.unite(a, b);

  // Representative per root: smallest id.
  std::unordered_map<std::size_t, std::size_t> rep_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    const auto [it, inserted] = rep_of_root.emplace(root, i);
    if (!inserted && ids[i] < ids[it->second]) it->second = i;
  }
  std::vector<std::size_t> reps;
  reps.reserve(rep_of_root.size());
  for (const auto& [root, rep] : rep_of_root) reps.push_back(rep);
  std::sort(reps.begin(), reps.end(), [&ids](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  std::unordered_map<std::size_t, std::size_t> cluster_of_root;
  ClusterAssignment out;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    cluster_of_root[sets.find(reps[k])] = k;
    out.representatives.push_back(ids[reps[k]]);
  }
  out.ids.assign(ids.begin(), ids.end());
  out.cluster_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.cluster_of[i] = cluster_of_root.at(sets.find(i));
  return out;
}

}  // namespace

const char* to_string(DistanceMetric metric) noexcept {
  return metric == DistanceMetric::kCosine ? "cosine_distance" : "euclidean";
}

const char* to_string(DedupStrategy strategy) noexcept {
  return strategy == DedupStrategy::kBruteForce ? "brute_force" : "grid";
}

DistanceMetric parse_distance_metric(std::string_view text) {
  if (text == "cosine_distance" || text == "cosine") return DistanceMetric::kCosine;
  if (text == "euclidean") return DistanceMetric::kEuclidean;
  throw ConfigError("unknown dedup metric '" + std::string(text) + "'");
}

DedupStrategy parse_dedup_strategy(std::string_view text) {
  if (text == "brute_force") return DedupStrategy::kBruteForce;
  if (text == "grid") return DedupStrategy::kGrid;
  throw ConfigError("unknown dedup strategy '" + std::string(text) + "'");
}

void DedupConfig::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("dedup.radius must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

double embedding_distance(std::span<const float> a, std::span<const float> b,
                          DistanceMetric metric) {
  if (a.size() != b.size()) throw DataError("embedding_distance: dimension mismatch");
  if (metric == DistanceMetric::kEuclidean) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = static_cast<double>(a[i]) - b[i];
      sum += d * d;
    }
    return std::sqrt(sum);
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DataError("cosine distance of a zero vector");
  return std::max(0.0, 1.0 - dot / std::sqrt(na * nb));
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

ClusterAssignment dedup(const EmbeddingStore& store, std::span<const std::string> ids,
                        const DedupConfig& config) {
  if (ids.size() != store.count()) {
    throw DataError("dedup: " + std::to_string(ids.size()) + " ids for " +
                    std::to_string(store.count()) + " embeddings");
  }
  Rows rows;
  rows.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) rows.push_back(store.row(i));
  return cluster(rows, ids, config);
}

ClusterAssignment dedup_records(std::span<const PartialLabelRecord> records,
                                const EmbeddingStore& store, const DedupConfig& config) {
  check_embedding_indices(records, store);
  Rows rows;
  std::vector<std::string> ids;
  for (const auto& r : records) {
    rows.push_back(store.row(r.embedding_index));
    ids.push_back(r.id);
  }
  return cluster(rows, ids, config);
}

std::vector<PartialLabelRecord> keep_representatives(std::span<const PartialLabelRecord> records,
                                                     const ClusterAssignment& assignment) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < assignment.ids.size(); ++i) position.emplace(assignment.ids[i], i);
  std::vector<PartialLabelRecord> out;
  for (const auto& r : records) {
    const auto it = position.find(r.id);
    if (it == position.end()) throw DataError("record " + r.id + " missing from cluster assignment");
    const std::size_t cluster = assignment.cluster_of.at(it->second);
    if (cluster >= assignment.cluster_count()) {
      throw DataError("record " + r.id + " references unknown cluster " + std::to_string(cluster));
    }
    if (assignment.representatives[cluster] == r.id) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

void write_cluster_csv(const ClusterAssignment& assignment, std::ostream& out) {
  out << "id,cluster_id,is_representative\n";
  for (std::size_t i = 0; i < assignment.ids.size(); ++i) {
    out << assignment.ids[i] << ',' << assignment.cluster_of[i] << ','
        << (assignment.is_representative(i) ? 1 : 0) << '\n';
  }
}

}  // namespace incidents
