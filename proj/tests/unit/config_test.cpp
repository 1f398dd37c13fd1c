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

#include "incidents/cli/commands.hpp"
#include "incidents/cli/config.hpp"
#include "incidents/error.hpp"

namespace incidents::cli {
namespace {

TEST(RunConfigTest, Defaults) {
  const RunConfig c;
  EXPECT_EQ(c.get_u64("seed"), 0u);
  EXPECT_EQ(c.get_string("train.loss"), "cn");
  EXPECT_DOUBLE_EQ(c.get_double("train.lr"), 1e-4);
  EXPECT_EQ(c.get_size("train.batch_size"), 256u);
  EXPECT_FALSE(c.get_bool("eval.augmented"));
  EXPECT_FALSE(c.get_path("paths.manifest").has_value());
  EXPECT_THROW(c.require_path("paths.manifest"), ConfigError);
}

TEST(RunConfigTest, ParsesSectionsArraysAndComments) {
  RunConfig c;
  c.load_text(
      "seed = 9  # master\n"
      "[train]\n"
      "loss = \"ce\"\n"
      "hidden = [64, 32]\n"
      "use_class_negatives = false\n"
      "[geo]\n"
      "x_km = [1, 25.5, 200]\n"
      "[paths]\n"
      "manifest = \"data/m.jsonl\"\n",
      "c.toml", "/base");
  EXPECT_EQ(c.get_u64("seed"), 9u);
  EXPECT_EQ(c.get_string("train.loss"), "ce");
  EXPECT_EQ(c.get_sizes("train.hidden"), (std::vector<std::size_t>{64, 32}));
  EXPECT_FALSE(c.get_bool("train.use_class_negatives"));
  EXPECT_EQ(c.get_doubles("geo.x_km"), (std::vector<double>{1, 25.5, 200}));
  EXPECT_EQ(*c.get_path("paths.manifest"), std::filesystem::path("/base/data/m.jsonl"));
}

TEST(RunConfigTest, ErrorsCarryContext) {
  RunConfig c;
  try {
    c.load_text("[train]\nlr = 1\nbogus = 2\n", "c.toml", "/");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("c.toml:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(c.load_text("[train\n", "c.toml", "/"), ConfigError);
  EXPECT_THROW(c.load_text("novalue\n", "c.toml", "/"), ConfigError);
  EXPECT_THROW(c.set("train.nope", "1", "test"), ConfigError);
  c.set("train.lr", "fast", "test");
  EXPECT_THROW(c.get_double("train.lr"), ConfigError);
  c.set("train.batch_size", "-3", "test");
  EXPECT_THROW(c.get_size("train.batch_size"), ConfigError);
  c.set("quiet", "maybe", "test");
  EXPECT_THROW(c.get_bool("quiet"), ConfigError);
}

TEST(RunConfigTest, EnvironmentMapping) {
  RunConfig c;
  c.load_env({{"INCIDENT_TRAIN_LR", "0.01"},
              {"INCIDENT_SEED", "4"},
              {"INCIDENT_TRAIN_BATCH_SIZE", "32"},
              {"INCIDENT_SYNTH_N_INCIDENT_CLASSES", "5"},
              {"HOME", "/root"}});
  EXPECT_DOUBLE_EQ(c.get_double("train.lr"), 0.01);
  EXPECT_EQ(c.get_u64("seed"), 4u);
  EXPECT_EQ(c.get_size("train.batch_size"), 32u);
  EXPECT_EQ(c.get_size("synth.n_incident_classes"), 5u);
  EXPECT_THROW(c.load_env({{"INCIDENT_NOT_A_KEY", "1"}}), ConfigError);
}

TEST(RunConfigTest, LayersOverride) {
  const auto dir = std::filesystem::temp_directory_path() / "incidents_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "run.toml");
    f << "seed = 1\n[train]\nlr = 0.5\nbatch_size = 8\n[paths]\nmanifest = \"m.jsonl\"\n";
  }
  RunConfig c;
  c.load_file(dir / "run.toml");
  EXPECT_EQ(*c.get_path("paths.manifest"), dir / "m.jsonl");
  c.load_env({{"INCIDENT_TRAIN_LR", "0.25"}});
  c.set("train.lr", "0.125", "flag");
  EXPECT_DOUBLE_EQ(c.get_double("train.lr"), 0.125);
  EXPECT_EQ(c.get_size("train.batch_size"), 8u);
  EXPECT_EQ(c.to_json()["train.lr"].get<std::string>(), "0.125");
  std::filesystem::remove_all(dir);
}

TEST(RunConfigTest, TrainConfigTranslation) {
  RunConfig c;
  c.set("train.loss", "ce", "t");
  c.set("train.hidden", "[16]", "t");
  c.set("train.use_places_aug", "false", "t");
  c.set("seed", "12", "t");
  const TrainConfig tc = train_config_from(c);
  EXPECT_EQ(tc.loss, LossVariant::kCrossEntropy);
  EXPECT_EQ(tc.hidden, (std::vector<std::size_t>{16}));
  EXPECT_FALSE(tc.use_places_aug);
  EXPECT_EQ(tc.seed, 12u);
  c.set("train.loss", "svm", "t");
  EXPECT_THROW(train_config_from(c), ConfigError);
}

}  // namespace
}  // namespace incidents::cli
