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

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "incidents/dedup.hpp"
#include "incidents/error.hpp"
#include "incidents/random.hpp"
#include "support/oracles.hpp"

namespace incidents {
namespace {

EmbeddingStore store_of(std::size_t dim, std::vector<float> values) {
  return EmbeddingStore(dim, std::move(values));
}

std::vector<std::string> ids_of(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "id" + std::to_string(100 + i);
  return ids;
}

TEST(DistanceTest, CosineAndEuclidean) {
  const std::vector<float> a{1, 0}, b{0, 2}, c{3, 0}, z{0, 0};
  EXPECT_NEAR(embedding_distance(a, b, DistanceMetric::kCosine), 1.0, 1e-12);
  EXPECT_EQ(embedding_distance(a, c, DistanceMetric::kCosine), 0.0);
  EXPECT_NEAR(embedding_distance(a, b, DistanceMetric::kEuclidean), std::sqrt(5.0), 1e-12);
  EXPECT_THROW(embedding_distance(a, z, DistanceMetric::kCosine), DataError);
  EXPECT_EQ(parse_distance_metric("cosine_distance"), DistanceMetric::kCosine);
  EXPECT_EQ(parse_dedup_strategy("grid"), DedupStrategy::kGrid);
  EXPECT_THROW(parse_dedup_strategy("lsh"), ConfigError);
}

TEST(DisjointSetsTest, Unites) {
  DisjointSets s(5);
  EXPECT_TRUE(s.unite(0, 1));
  EXPECT_TRUE(s.unite(3, 4));
  EXPECT_FALSE(s.unite(1, 0));
  EXPECT_EQ(s.find(0), s.find(1));
  EXPECT_NE(s.find(1), s.find(3));
}

TEST(DedupTest, ChainsMergeTransitively) {
  // Points on a line spaced 0.6 apart with radius 1: a single chain.
  const auto store = store_of(1, {0.0f, 0.6f, 1.2f, 1.8f, 5.0f});
  const auto ids = ids_of(5);
  DedupConfig cfg;
  cfg.metric = DistanceMetric::kEuclidean;
  cfg.radius = 1.0;
  const ClusterAssignment a = dedup(store, ids, cfg);
  EXPECT_EQ(a.cluster_count(), 2u);
  EXPECT_EQ(a.representatives, (std::vector<std::string>{"id100", "id104"}));
  EXPECT_EQ(a.cluster_of, (std::vector<std::size_t>{0, 0, 0, 0, 1}));
  EXPECT_TRUE(a.is_representative(0));
  EXPECT_FALSE(a.is_representative(2));
}

TEST(DedupTest, BruteAndGridAgreeWithBfsOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(60);
    const std::size_t dim = 2 + rng.uniform_index(5);
    const auto metric = trial % 2 ? DistanceMetric::kCosine : DistanceMetric::kEuclidean;
    std::vector<float> values(n * dim);
    for (auto& v : values) v = static_cast<float>(rng.normal());
    const auto store = store_of(dim, values);
    auto ids = ids_of(n);
    rng.shuffle(ids);
    DedupConfig cfg;
    cfg.metric = metric;
    cfg.radius = metric == DistanceMetric::kCosine ? 0.15 : 0.8;
    const auto expected = oracle::bfs_representatives(
        ids,
        [&](std::size_t i, std::size_t j) {
          return embedding_distance(store.row(i), store.row(j), metric);
        },
        cfg.radius);
    for (auto strategy : {DedupStrategy::kBruteForce, DedupStrategy::kGrid}) {
      for (std::size_t threads : {1u, 3u}) {
        cfg.strategy = strategy;
        cfg.threads = threads;
        const ClusterAssignment a = dedup(store, ids, cfg);
        for (std::size_t i = 0; i < n; ++i) {
          ASSERT_EQ(a.representatives[a.cluster_of[i]], expected[i])
              << to_string(strategy) << " trial " << trial;
        }
        EXPECT_TRUE(std::is_sorted(a.representatives.begin(), a.representatives.end()));
      }
    }
  }
}

TEST(DedupTest, KeepRepresentatives) {
  const auto store = store_of(2, {1, 0, 1, 0.01f, 0, 1});
  std::vector<PartialLabelRecord> records(3);
  records[0].id = "z";
  records[0].embedding_index = 0;
  records[1].id = "b";
  records[1].embedding_index = 1;
  records[2].id = "m";
  records[2].embedding_index = 2;
  const ClusterAssignment a = dedup_records(records, store, DedupConfig{});
  const auto kept = keep_representatives(records, a);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, "b");
  EXPECT_EQ(kept[1].id, "m");

  std::ostringstream csv;
  write_cluster_csv(a, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "id,cluster_id,is_representative");
}

TEST(DedupTest, ValidatesInput) {
  const auto store = store_of(2, {1, 0, 0, 1});
  DedupConfig cfg;
  cfg.radius = -1;
  EXPECT_THROW(dedup(store, ids_of(2), cfg), ConfigError);
  EXPECT_THROW(dedup(store, ids_of(3), DedupConfig{}), DataError);
}

}  // namespace
}  // namespace incidents
