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

#include <filesystem>
#include <fstream>

#include "incidents/embeddings.hpp"
#include "incidents/error.hpp"
#include "incidents/synth.hpp"

namespace incidents {
namespace {

SynthSpec small_spec() {
  SynthSpec s;
  s.n_incident_classes = 3;
  s.n_place_classes = 2;
  s.n_train_per_class = 20;
  s.n_val_per_class = 5;
  s.n_test_per_class = 10;
  s.places_aug_per_class = 6;
  s.dim = 8;
  return s;
}

TEST(SynthTest, CountsAndTaxonomyPrefix) {
  const SynthWorld w = synthesize(small_spec());
  EXPECT_EQ(w.taxonomy.size(Task::kIncident), 3u);
  EXPECT_EQ(w.train.size(), 3u * 20u + 2u * 6u);
  EXPECT_EQ(w.store.dim(), 8u);
  EXPECT_EQ(hard_negatives(w.train).size(), 3u * 6u);
  for (const auto& r : w.train) EXPECT_NO_THROW(validate_record(r, w.taxonomy));
  EXPECT_EQ(w.events.size(), w.spec.geo.events);
  EXPECT_FALSE(w.detections.empty());
}

TEST(SynthTest, Deterministic) {
  const SynthWorld a = synthesize(small_spec());
  const SynthWorld b = synthesize(small_spec());
  EXPECT_EQ(a.store, b.store);
  EXPECT_EQ(a.bursts.series, b.bursts.series);
  SynthSpec other = small_spec();
  other.seed = 1;
  EXPECT_FALSE(synthesize(other).store == a.store);
}

TEST(SynthTest, HardNegativesStayNearTheirCluster) {
  const SynthWorld w = synthesize(small_spec());
  for (const auto* r : hard_negatives(w.train)) {
    const auto row = w.store.row(r->embedding_index);
    Eigen::VectorXd v(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) v(static_cast<Eigen::Index>(j)) = row[j];
    const double d = (v - w.cluster_center(r->incident_neg.front(), *r->place_pos)).norm();
    EXPECT_LE(d, 2.0 * w.spec.sigma + 1e-5);
  }
}

TEST(SynthTest, NoHardNegativesWhenFractionZero) {
  SynthSpec s = small_spec();
  s.hard_negative_fraction = 0.0;
  const SynthWorld w = synthesize(s);
  for (const auto& r : w.train) EXPECT_TRUE(r.incident_neg.empty());
}

TEST(SynthTest, BurstOnsetsInsideWindow) {
  BurstScenario b;
  const BurstSeries s = synthesize_bursts(b, 4);
  EXPECT_EQ(s.series.size(), b.days);
  ASSERT_EQ(s.onsets.size(), b.bursts);
  for (const Date d : s.onsets) {
    const auto idx = d - s.series.start;
    EXPECT_GE(idx, static_cast<std::int64_t>(b.w + 1));
    EXPECT_LE(idx + static_cast<std::int64_t>(b.w) + 1, static_cast<std::int64_t>(b.days));
  }
}

TEST(SynthTest, ValidateRejectsBadSettings) {
  SynthSpec s = small_spec();
  s.hard_negative_fraction = 1.5;
  EXPECT_THROW(s.validate(), ConfigError);
  s = small_spec();
  s.n_incident_classes = 500;
  EXPECT_THROW(synthesize(s), ConfigError);
}

TEST(SynthTest, WritesLoadableWorld) {
  const auto dir = std::filesystem::temp_directory_path() / "incidents_synth_test";
  std::filesystem::remove_all(dir);
  const SynthWorld w = synthesize(small_spec());
  write_synth_world(w, dir);
  for (const char* name : {"taxonomy.txt", "manifest.jsonl", "embeddings.bin", "events.csv",
                           "detections.csv", "series.csv", "train.toml", "synth_report.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
  const Taxonomy t = load_taxonomy(dir / "taxonomy.txt");
  EXPECT_EQ(load_manifest(dir / "manifest.jsonl", t).size(), w.train.size());
  std::ifstream in(dir / "embeddings.bin", std::ios::binary);
  EXPECT_EQ(read_embeddings(in), w.store);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace incidents
