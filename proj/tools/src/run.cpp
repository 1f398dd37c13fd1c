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

#include <functional>
#include <memory>
#include <ostream>
#include <streambuf>

#include <CLI11.hpp>

#include "incidents/cli/commands.hpp"
#include "incidents/error.hpp"
#include "incidents/version.hpp"

namespace incidents::cli {
namespace {

class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

// Flag-to-setting bindings for one parse.
class Bindings {
 public:
  void option(CLI::App* app, const std::string& flag, const std::string& key,
              const std::string& help) {
    auto value = std::make_shared<std::string>();
    CLI::Option* opt = app->add_option(flag, *value, help + " [" + key + "]");
    options_.push_back({opt, key, value, {}});
  }

  void flag(CLI::App* app, const std::string& flag, const std::string& key,
            const std::string& value, const std::string& help) {
    CLI::Option* opt = app->add_flag(flag)->description(help + " [" + key + "=" + value + "]");
    options_.push_back({opt, key, nullptr, value});
  }

  void apply(RunConfig& config) const {
    for (const auto& b : options_) {
      if (b.option->count() == 0) continue;
      config.set(b.key, b.value ? *b.value : b.fixed, "flag:" + b.option->get_name());
    }
  }

 private:
  struct Binding {
    CLI::Option* option;
    std::string key;
    std::shared_ptr<std::string> value;
    std::string fixed;
  };
  std::vector<Binding> options_;
};

void error_line(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << nlohmann::json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump()
      << std::endl;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env) {
  CLI::App app{"Incident detection toolkit: training, evaluation and field analytics"};
  app.name("incidents");
  app.set_version_flag("--version", std::string(kGitDescribe));
  app.require_subcommand(1, 1);

  Bindings bindings;
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "TOML-like configuration file");
  bindings.option(&app, "--seed", "seed", "Master seed");
  bindings.option(&app, "--out", "out", "Output directory");
  bindings.option(&app, "--threads", "threads", "Worker threads");
  bindings.flag(&app, "--quiet", "quiet", "true", "Suppress progress output");
  app.add_option("--set", overrides, "Override any setting, KEY=VALUE");

  auto* synth = app.add_subcommand("synth", "Generate the synthetic benchmark");
  bindings.option(synth, "--n-incident-classes", "synth.n_incident_classes", "Incident classes");
  bindings.option(synth, "--n-place-classes", "synth.n_place_classes", "Place classes");
  bindings.option(synth, "--dim", "synth.dim", "Embedding dimension");
  bindings.option(synth, "--separation", "synth.separation", "Cluster separation");
  bindings.option(synth, "--hard-negative-fraction", "synth.hard_negative_fraction",
                  "Share of hard negatives per class");

  auto* train = app.add_subcommand("train", "Train the two-head classifier");
  bindings.option(train, "--taxonomy", "paths.taxonomy", "Taxonomy file");
  bindings.option(train, "--manifest", "paths.manifest", "Training manifest");
  bindings.option(train, "--val-manifest", "paths.val_manifest", "Validation manifest");
  bindings.option(train, "--embeddings", "paths.embeddings", "Embedding store");
  bindings.option(train, "--loss", "train.loss", "cn or ce");
  bindings.option(train, "--lr", "train.lr", "Adam learning rate");
  bindings.option(train, "--batch-size", "train.batch_size", "Batch size");
  bindings.option(train, "--min-epochs", "train.min_epochs", "Minimum epochs");
  bindings.option(train, "--max-epochs", "train.max_epochs", "Maximum epochs");
  bindings.option(train, "--hidden", "train.hidden", "Trunk widths, comma separated");
  bindings.flag(train, "--no-class-negatives", "train.use_class_negatives", "false",
                "Ignore negative-only incident labels");
  bindings.flag(train, "--no-places-aug", "train.use_places_aug", "false",
                "Drop places_aug records");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint or run the ablation table");
  bindings.option(eval, "--checkpoint", "paths.checkpoint", "Checkpoint file");
  bindings.option(eval, "--taxonomy", "paths.taxonomy", "Taxonomy file");
  bindings.option(eval, "--manifest", "paths.test_manifest", "Test manifest");
  bindings.option(eval, "--embeddings", "paths.embeddings", "Embedding store");
  bindings.option(eval, "--threshold", "eval.threshold", "Hard-negative threshold");
  bindings.flag(eval, "--augmented", "eval.augmented", "true", "Include places_aug examples");
  bindings.flag(eval, "--table1", "eval.table1", "true", "Train and tabulate the ablation rows");

  auto* dedup = app.add_subcommand("dedup", "Cluster near-duplicate embeddings");
  bindings.option(dedup, "--taxonomy", "paths.taxonomy", "Taxonomy file");
  bindings.option(dedup, "--manifest", "paths.manifest", "Manifest");
  bindings.option(dedup, "--embeddings", "paths.embeddings", "Embedding store");
  bindings.option(dedup, "--radius", "dedup.radius", "Link radius");
  bindings.option(dedup, "--metric", "dedup.metric", "cosine_distance or euclidean");
  bindings.option(dedup, "--strategy", "dedup.strategy", "brute_force or grid");

  auto* filter = app.add_subcommand("filter", "Keep confident detections");
  bindings.option(filter, "--detections", "paths.detections", "Detections CSV");
  bindings.option(filter, "--category", "filter.category", "Incident category");
  bindings.option(filter, "--threshold", "filter.threshold", "Confidence threshold");

  auto* geo = app.add_subcommand("geo-eval", "Accuracy@XKm curves and per-event AP");
  bindings.option(geo, "--detections", "paths.detections", "Detections CSV");
  bindings.option(geo, "--events", "paths.events", "Events CSV");
  bindings.option(geo, "--category", "geo.category", "Incident category");
  bindings.option(geo, "--threshold", "geo.threshold", "Confidence threshold");
  bindings.option(geo, "--x-km", "geo.x_km", "Distances, comma separated");
  bindings.option(geo, "--radius-km", "geo.radius_km", "Event gate radius");
  bindings.option(geo, "--trials", "geo.trials", "Shuffle baseline trials");

  auto* monitor = app.add_subcommand("monitor", "RTI, mRTI, peaks and histogram IoU");
  bindings.option(monitor, "--series", "paths.series", "Daily counts CSV");
  bindings.option(monitor, "--events", "paths.series_events", "Events CSV");
  bindings.option(monitor, "--compare", "paths.compare_series", "Second series for IoU");
  bindings.option(monitor, "--w", "monitor.w", "RTI window in days");
  bindings.option(monitor, "--smooth-window", "monitor.smooth_window", "Odd smoothing width");
  bindings.option(monitor, "--rti-threshold", "monitor.rti_threshold", "Peak threshold");

  const std::pair<CLI::App*, nlohmann::json (*)(const RunConfig&, std::ostream&)> commands[] = {
      {synth, cmd_synth}, {train, cmd_train},     {eval, cmd_eval},      {dedup, cmd_dedup},
      {filter, cmd_filter}, {geo, cmd_geo_eval}, {monitor, cmd_monitor},
  };
  for (const auto& c : commands) c.first->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    error_line(err, "config", e.what(), 2);
    return 2;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config.load_file(config_path);
    config.load_env(env);
    bindings.apply(config);
    for (const auto& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects KEY=VALUE, got '" + item + "'");
      config.set(item.substr(0, eq), item.substr(eq + 1), "flag:--set");
    }
    if (config.get_size("threads") < 1) throw ConfigError("threads must be at least 1");
    (void)config.get_u64("seed");

    NullBuffer null_buffer;
    std::ostream null_stream(&null_buffer);
    std::ostream& log = config.get_bool("quiet") ? null_stream : out;
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) {
        fn(config, log);
        return 0;
      }
    }
    throw ConfigError("no subcommand");
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    error_line(err, to_string(e.kind()), e.what(), code);
    return code;
  } catch (const std::filesystem::filesystem_error& e) {
    error_line(err, "data", e.what(), 3);
    return 3;
  } catch (const nlohmann::json::exception& e) {
    error_line(err, "data", e.what(), 3);
    return 3;
  }
}

}  // namespace incidents::cli
