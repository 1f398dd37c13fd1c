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
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "incidents/cli/commands.hpp"
#include "incidents/temporal.hpp"
#include "support/oracles.hpp"

namespace incidents::cli {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult invoke(std::vector<std::string> args,
                 const std::map<std::string, std::string>& env = {}) {
  args.insert(args.begin(), "incidents");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err, env);
  return {code, out.str(), err.str()};
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

class CommandsTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(fs::temp_directory_path() / "incidents_commands_test");
    fs::remove_all(*root_);
    const RunResult r = invoke({"--quiet", "--out", (*root_ / "world").string(), "--set",
                                "synth.n_train_per_class=40", "--set", "synth.n_test_per_class=20",
                                "synth", "--n-incident-classes", "4", "--n-place-classes", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
  }
  static std::string world(const char* name) { return (*root_ / "world" / name).string(); }
  static std::string out(const char* name) { return (*root_ / name).string(); }
  static fs::path* root_;
};
fs::path* CommandsTest::root_ = nullptr;

TEST_F(CommandsTest, TrainThenEvaluate) {
  const std::string config = world("train.toml");
  RunResult r = invoke({"--config", config, "--quiet", "--out", out("train"), "train",
                        "--min-epochs", "3", "--max-epochs", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = read_json(*root_ / "train" / "train_report.json");
  EXPECT_EQ(report["command"], "train");
  EXPECT_TRUE(fs::exists(*root_ / "train" / "checkpoint.bin"));
  std::ifstream log(*root_ / "train" / "epochs.jsonl");
  std::string first;
  ASSERT_TRUE(std::getline(log, first));
  const auto epoch = nlohmann::json::parse(first);
  EXPECT_EQ(epoch["epoch"], 1);
  EXPECT_TRUE(epoch.contains("wall_time_s"));
  EXPECT_TRUE(epoch.contains("val_incident_map"));

  const std::string ckpt = out("train/checkpoint.bin");
  r = invoke({"--config", config, "--quiet", "--out", out("eval"), "eval", "--checkpoint", ckpt});
  ASSERT_EQ(r.code, 0) << r.err;
  r = invoke({"--config", config, "--quiet", "--out", out("eval_aug"), "eval", "--augmented",
              "--checkpoint", ckpt});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto plain = read_json(*root_ / "eval" / "eval_report.json");
  const auto aug = read_json(*root_ / "eval_aug" / "eval_report.json");
  EXPECT_FALSE(plain["augmented"].get<bool>());
  EXPECT_TRUE(aug["augmented"].get<bool>());
  EXPECT_NE(plain["place"]["mean_ap"], aug["place"]["mean_ap"]);
  EXPECT_TRUE(fs::exists(*root_ / "eval" / "ap_incident.csv"));
}

TEST_F(CommandsTest, MonitorMatchesDirectSummation) {
  const RunResult r = invoke({"--config", world("train.toml"), "--quiet", "--out", out("monitor"),
                              "monitor", "--w", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = read_json(*root_ / "monitor" / "monitor_report.json");
  const DailySeries s = load_series_csv(world("series.csv"));
  std::vector<double> counts(s.counts.begin(), s.counts.end());
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : report["events"]) {
    const auto day = Date::parse(e["date"].get<std::string>());
    sum += oracle::rti_sum(counts, static_cast<std::size_t>(day - s.start), 7);
    ++n;
  }
  ASSERT_GT(n, 0u);
  EXPECT_NEAR(report["mrti"].get<double>(), sum / static_cast<double>(n), 1e-12);
}

TEST_F(CommandsTest, DedupFilterGeo) {
  const std::string config = world("train.toml");
  EXPECT_EQ(invoke({"--config", config, "--quiet", "--out", out("dedup"), "dedup", "--strategy",
                    "grid", "--radius", "0.05"})
                .code,
            0);
  EXPECT_TRUE(fs::exists(*root_ / "dedup" / "clusters.csv"));
  EXPECT_EQ(invoke({"--config", config, "--quiet", "--out", out("filter"), "filter"}).code, 0);
  EXPECT_EQ(invoke({"--config", config, "--quiet", "--out", out("geo"), "geo-eval"}).code, 0);
  const auto geo = read_json(*root_ / "geo" / "geo_report.json");
  EXPECT_EQ(geo["command"], "geo-eval");
}

TEST_F(CommandsTest, ExitCodes) {
  RunResult r = invoke({"train", "--lr", "not-a-number"});
  EXPECT_EQ(r.code, 2);
  const auto line = nlohmann::json::parse(r.err);
  EXPECT_EQ(line["error"], "config");
  EXPECT_EQ(line["exit_code"], 2);

  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"--set", "train.nope=1", "train"}).code, 2);
  EXPECT_EQ(invoke({"train"}, {{"INCIDENT_BOGUS", "1"}}).code, 2);

  r = invoke({"--out", out("missing"), "train", "--manifest", out("none.jsonl"), "--embeddings",
              out("none.bin")});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "data");

  r = invoke({"--config", world("train.toml"), "--quiet", "--out", out("diverge"), "train",
              "--lr", "1e307", "--min-epochs", "1", "--max-epochs", "2"});
  EXPECT_EQ(r.code, 4) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "numeric");
}

TEST_F(CommandsTest, FlagsBeatEnvironmentBeatFile) {
  const std::string config = world("train.toml");
  const RunResult r = invoke({"--config", config, "--quiet", "--out", out("layers"), "--set",
                              "train.max_epochs=2", "train", "--min-epochs", "1"},
                             {{"INCIDENT_TRAIN_MIN_EPOCHS", "2"}, {"INCIDENT_TRAIN_LR", "0.002"}});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto cfg = read_json(*root_ / "layers" / "train_report.json")["config"];
  EXPECT_EQ(cfg["train.min_epochs"], "1");
  EXPECT_EQ(cfg["train.max_epochs"], "2");
  EXPECT_EQ(cfg["train.lr"], "0.002");
}

}  // namespace
}  // namespace incidents::cli
