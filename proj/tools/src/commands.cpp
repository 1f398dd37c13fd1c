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

#include "incidents/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "incidents/checkpoint.hpp"
#include "incidents/dataset.hpp"
#include "incidents/dedup.hpp"
#include "incidents/embeddings.hpp"
#include "incidents/error.hpp"
#include "incidents/eval.hpp"
#include "incidents/geo.hpp"
#include "incidents/taxonomy.hpp"
#include "incidents/temporal.hpp"
#include "incidents/version.hpp"

namespace incidents::cli {
namespace {

namespace fs = std::filesystem;

fs::path output_dir(const RunConfig& config) {
  const fs::path dir = config.require_path("out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& value) {
  auto out = open_output(path);
  out << value.dump(2) << '\n';
}

nlohmann::json report_base(const RunConfig& config, const char* command) {
  return {{"command", command}, {"version", kGitDescribe}, {"config", config.to_json()}};
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

Taxonomy load_taxonomy_from(const RunConfig& config) {
  const auto path = config.get_path("paths.taxonomy");
  return path ? load_taxonomy(*path) : default_taxonomy();
}

std::vector<PartialLabelRecord> load_records(const RunConfig& config, const std::string& key,
                                             const Taxonomy& taxonomy) {
  return load_manifest(config.require_path(key), taxonomy);
}

double percent(const std::optional<double>& v) { return v ? *v * 100.0 : std::nan(""); }

std::string format_percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << *v * 100.0;
  return s.str();
}

struct MapPair {
  ApResult incident;
  ApResult place;
};

MapPair evaluate_maps(const ModelParams& params, LossVariant variant,
                      std::span<const PartialLabelRecord> records, const EmbeddingStore& store,
                      const Taxonomy& taxonomy, bool augmented) {
  const Predictions pred = predict_records(params, variant, records, store);
  const auto inc = make_scored_examples(records, pred.incident, Task::kIncident, taxonomy);
  const auto pl = make_scored_examples(records, pred.place, Task::kPlace, taxonomy);
  return {detection_map(inc, Task::kIncident, taxonomy, augmented),
          detection_map(pl, Task::kPlace, taxonomy, augmented)};
}

struct TrainInputs {
  Taxonomy taxonomy;
  EmbeddingStore store;
  std::vector<PartialLabelRecord> train;
  std::vector<PartialLabelRecord> val;
};

TrainInputs load_train_inputs(const RunConfig& config) {
  TrainInputs in;
  in.taxonomy = load_taxonomy_from(config);
  in.store = load_embeddings(config.require_path("paths.embeddings"));
  auto records = load_records(config, "paths.manifest", in.taxonomy);
  check_embedding_indices(records, in.store);
  if (config.get_path("paths.val_manifest")) {
    in.train = std::move(records);
    in.val = load_records(config, "paths.val_manifest", in.taxonomy);
    check_embedding_indices(in.val, in.store);
  } else {
    const SplitManifest parts = split(records, config.get_u64("seed"));
    in.train = select_records(records, parts.train);
    in.val = select_records(records, parts.val);
  }
  return in;
}

nlohmann::json table1(const RunConfig& config, std::ostream& log) {
  const fs::path dir = output_dir(config);
  const TrainInputs in = load_train_inputs(config);
  const auto test = load_records(config, "paths.test_manifest", in.taxonomy);
  check_embedding_indices(test, in.store);

  struct Row {
    const char* trunk;
    LossVariant loss;
    bool class_negatives;
    bool places;
    bool wide;
  };
  const Row rows[] = {
      {"narrow", LossVariant::kCrossEntropy, false, true, false},
      {"narrow", LossVariant::kClassNegative, false, true, false},
      {"narrow", LossVariant::kClassNegative, true, false, false},
      {"narrow", LossVariant::kClassNegative, true, true, false},
      {"wide", LossVariant::kClassNegative, true, true, true},
  };
  const TrainConfig base = train_config_from(config);
  const std::size_t wide = config.get_size("eval.wide_hidden");

  std::ostringstream md;
  md << "| Trunk | Loss | Class Negatives | Additional Places Images | Test Incident mAP | "
        "Test Place mAP | Augmented Incident mAP | Augmented Place mAP |\n"
     << "|---|---|---|---|---|---|---|---|\n";
  nlohmann::json json_rows = nlohmann::json::array();
  for (const Row& row : rows) {
    TrainConfig tc = base;
    tc.loss = row.loss;
    tc.use_class_negatives = row.class_negatives;
    tc.use_places_aug = row.places;
    if (row.wide) tc.hidden = {wide};
    const TrainResult result = train(in.train, in.val, in.store, in.taxonomy, tc);
    const MapPair plain = evaluate_maps(result.params, tc.loss, test, in.store, in.taxonomy, false);
    const MapPair aug = evaluate_maps(result.params, tc.loss, test, in.store, in.taxonomy, true);
    std::string trunk = "mlp-";
    for (std::size_t i = 0; i < tc.hidden.size(); ++i) {
      trunk += (i ? "x" : "") + std::to_string(tc.hidden[i]);
    }
    md << "| " << trunk << " | " << (row.loss == LossVariant::kCrossEntropy ? "CE" : "CN")
       << " | " << (row.class_negatives ? "✓" : "") << " | " << (row.places ? "✓" : "") << " | "
       << format_percent(plain.incident.mean_ap) << " | " << format_percent(plain.place.mean_ap)
       << " | " << format_percent(aug.incident.mean_ap) << " | "
       << format_percent(aug.place.mean_ap) << " |\n";
    json_rows.push_back({{"trunk", trunk},
                         {"train_config", tc.to_json()},
                         {"epochs", result.epochs.size()},
                         {"places_aug_rows_checked", result.places_aug_rows_checked},
                         {"test_incident_map", optional_json(plain.incident.mean_ap)},
                         {"test_place_map", optional_json(plain.place.mean_ap)},
                         {"augmented_incident_map", optional_json(aug.incident.mean_ap)},
                         {"augmented_place_map", optional_json(aug.place.mean_ap)}});
    log << "table1 row " << json_rows.size() << ": " << trunk << ' ' << to_string(row.loss)
        << " incident mAP " << percent(plain.incident.mean_ap) << '\n';
  }
  {
    auto out = open_output(dir / "table1.md");
    out << md.str();
  }
  nlohmann::json report = report_base(config, "eval");
  report["table1"] = json_rows;
  report["markdown"] = md.str();
  write_json(dir / "table1.json", report);
  log << md.str();
  return report;
}

}  // namespace

TrainConfig train_config_from(const RunConfig& config) {
  TrainConfig tc;
  tc.loss = parse_loss_variant(config.get_string("train.loss"));
  tc.use_class_negatives = config.get_bool("train.use_class_negatives");
  tc.use_places_aug = config.get_bool("train.use_places_aug");
  tc.lr = config.get_double("train.lr");
  tc.batch_size = config.get_size("train.batch_size");
  tc.min_epochs = config.get_int("train.min_epochs");
  tc.max_epochs = config.get_int("train.max_epochs");
  tc.hidden = config.get_sizes("train.hidden");
  tc.min_improvement = config.get_double("train.min_improvement");
  tc.patience = config.get_int("train.patience");
  tc.adam.beta1 = config.get_double("train.beta1");
  tc.adam.beta2 = config.get_double("train.beta2");
  tc.adam.epsilon = config.get_double("train.epsilon");
  tc.seed = config.get_u64("seed");
  tc.validate();
  return tc;
}

SynthSpec synth_spec_from(const RunConfig& config) {
  SynthSpec s;
  s.seed = config.get_u64("seed");
  s.n_incident_classes = config.get_size("synth.n_incident_classes");
  s.n_place_classes = config.get_size("synth.n_place_classes");
  s.n_train_per_class = config.get_size("synth.n_train_per_class");
  s.n_val_per_class = config.get_size("synth.n_val_per_class");
  s.n_test_per_class = config.get_size("synth.n_test_per_class");
  s.places_aug_per_class = config.get_size("synth.places_aug_per_class");
  s.dim = config.get_size("synth.dim");
  s.separation = config.get_double("synth.separation");
  s.place_separation = config.get_double("synth.place_separation");
  s.sigma = config.get_double("synth.sigma");
  s.hard_negative_fraction = config.get_double("synth.hard_negative_fraction");
  s.hard_negative_offset = config.get_double("synth.hard_negative_offset");
  s.geo.events = config.get_size("synth.geo_events");
  s.geo.positives_per_event = config.get_size("synth.geo_positives_per_event");
  s.geo.positive_spread_km = config.get_double("synth.geo_positive_spread_km");
  s.geo.relevant_fraction = config.get_double("synth.geo_relevant_fraction");
  s.geo.irrelevant_spread_factor = config.get_double("synth.geo_irrelevant_spread_factor");
  s.geo.background = config.get_size("synth.geo_background");
  s.temporal.days = config.get_size("synth.days");
  s.temporal.baseline_rate = config.get_double("synth.baseline_rate");
  s.temporal.bursts = config.get_size("synth.bursts");
  s.temporal.burst_multiplier = config.get_double("synth.burst_multiplier");
  s.temporal.burst_length = config.get_size("synth.burst_length");
  s.temporal.w = config.get_size("monitor.w");
  s.validate();
  return s;
}

nlohmann::json cmd_synth(const RunConfig& config, std::ostream& log) {
  const SynthSpec spec = synth_spec_from(config);
  const fs::path dir = output_dir(config);
  const SynthWorld world = synthesize(spec);
  nlohmann::json extra = {{"command", "synth"}, {"config", config.to_json()}};
  write_synth_world(world, dir, extra);
  std::ifstream in(dir / "synth_report.json");
  nlohmann::json report = nlohmann::json::parse(in);
  log << "synth: " << world.train.size() << " train, " << world.val.size() << " val, "
      << world.test.size() << " test records written to " << dir.string() << '\n';
  return report;
}

nlohmann::json cmd_train(const RunConfig& config, std::ostream& log) {
  const TrainConfig tc = train_config_from(config);
  const fs::path dir = output_dir(config);
  const TrainInputs in = load_train_inputs(config);
  const TrainResult result =
      train(in.train, in.val, in.store, in.taxonomy, tc, [&log](const EpochLog& e) {
        log << "epoch " << e.epoch << " train_loss " << e.train_loss << " val_incident_map "
            << (e.val_incident_map ? std::to_string(*e.val_incident_map) : "n/a") << '\n';
      });

  const CheckpointMeta meta{in.taxonomy.fingerprint(), tc.loss, tc.to_json(), kGitDescribe};
  write_checkpoint(result.params, meta, dir / "checkpoint.bin");

  nlohmann::json timed = nlohmann::json::array();
  {
    auto log_out = open_output(dir / "epochs.jsonl");
    for (const auto& e : result.epochs) {
      timed.push_back(e.to_json(true));
      log_out << timed.back().dump() << '\n';
    }
  }

  nlohmann::json report = report_base(config, "train");
  report["train_config"] = tc.to_json();
  report["train_records"] = in.train.size();
  report["val_records"] = in.val.size();
  report["epochs"] = timed;
  report["converged"] = result.converged;
  report["batches"] = result.batches;
  report["places_aug_rows_checked"] = result.places_aug_rows_checked;
  report["checkpoint"] = (dir / "checkpoint.bin").generic_string();
  write_json(dir / "train_report.json", report);
  return report;
}

nlohmann::json cmd_eval(const RunConfig& config, std::ostream& log) {
  if (config.get_bool("eval.table1")) return table1(config, log);

  const fs::path dir = output_dir(config);
  const Taxonomy taxonomy = load_taxonomy_from(config);
  const Checkpoint ckpt = load_checkpoint(config.require_path("paths.checkpoint"));
  if (ckpt.meta.taxonomy_fingerprint != taxonomy.fingerprint()) {
    throw DataError("checkpoint taxonomy " + fingerprint_hex(ckpt.meta.taxonomy_fingerprint) +
                    " does not match " + fingerprint_hex(taxonomy.fingerprint()));
  }
  const EmbeddingStore store = load_embeddings(config.require_path("paths.embeddings"));
  const std::string key = config.get_path("paths.test_manifest") ? "paths.test_manifest"
                                                                 : "paths.manifest";
  const auto records = load_records(config, key, taxonomy);
  check_embedding_indices(records, store);
  const bool augmented = config.get_bool("eval.augmented");
  const double threshold = config.get_double("eval.threshold");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("eval.threshold outside [0, 1]");

  const Predictions pred = predict_records(ckpt.params, ckpt.meta.variant, records, store);
  const auto inc = make_scored_examples(records, pred.incident, Task::kIncident, taxonomy);
  const auto pl = make_scored_examples(records, pred.place, Task::kPlace, taxonomy);
  const ApResult inc_map = detection_map(inc, Task::kIncident, taxonomy, augmented);
  const ApResult pl_map = detection_map(pl, Task::kPlace, taxonomy, augmented);

  nlohmann::json report = report_base(config, "eval");
  report["checkpoint_config"] = ckpt.meta.config;
  report["records"] = records.size();
  report["augmented"] = augmented;
  report["incident"] = to_json(inc_map, Task::kIncident, taxonomy);
  report["place"] = to_json(pl_map, Task::kPlace, taxonomy);

  // Classification accuracy on positives only.
  const auto with_positive = [](const std::vector<ScoredExample>& all, bool keep_aug) {
    std::vector<ScoredExample> out;
    for (const auto& e : all) {
      if (!keep_aug && e.source == RecordSource::kPlacesAug) continue;
      if (std::find(e.label.targets.begin(), e.label.targets.end(), 1.0) != e.label.targets.end()) {
        out.push_back(e);
      }
    }
    return out;
  };
  const auto inc_pos = with_positive(inc, true);
  const auto pl_pos = with_positive(pl, augmented);
  nlohmann::json accuracy = nlohmann::json::object();
  for (std::size_t k : {std::size_t{1}, std::size_t{5}}) {
    if (!inc_pos.empty() && k <= taxonomy.size(Task::kIncident)) {
      accuracy["incident_top" + std::to_string(k)] = topk_accuracy(inc_pos, k);
    }
    if (!pl_pos.empty() && k <= taxonomy.size(Task::kPlace)) {
      accuracy["place_top" + std::to_string(k)] = topk_accuracy(pl_pos, k);
    }
  }
  report["accuracy"] = accuracy;

  std::vector<double> negative_confidences;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.incident_pos || r.source == RecordSource::kPlacesAug) continue;
    for (std::size_t c : r.incident_neg) {
      negative_confidences.push_back(pred.incident(static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(c)));
    }
  }
  if (!negative_confidences.empty()) {
    report["hard_negatives"] = to_json(hard_negative_report(negative_confidences, threshold));
  }

  write_json(dir / "eval_report.json", report);
  {
    auto out = open_output(dir / "ap_incident.csv");
    write_ap_csv(inc_map, Task::kIncident, taxonomy, out);
  }
  {
    auto out = open_output(dir / "ap_place.csv");
    write_ap_csv(pl_map, Task::kPlace, taxonomy, out);
  }
  log << "eval: incident mAP " << format_percent(inc_map.mean_ap) << ", place mAP "
      << format_percent(pl_map.mean_ap) << (augmented ? " (augmented)" : "") << '\n';
  return report;
}

nlohmann::json cmd_dedup(const RunConfig& config, std::ostream& log) {
  DedupConfig dc;
  dc.radius = config.get_double("dedup.radius");
  dc.metric = parse_distance_metric(config.get_string("dedup.metric"));
  dc.strategy = parse_dedup_strategy(config.get_string("dedup.strategy"));
  dc.threads = config.get_size("threads");
  dc.validate();
  const fs::path dir = output_dir(config);
  const Taxonomy taxonomy = load_taxonomy_from(config);
  const EmbeddingStore store = load_embeddings(config.require_path("paths.embeddings"));
  const auto records = load_records(config, "paths.manifest", taxonomy);
  const ClusterAssignment clusters = dedup_records(records, store, dc);
  const auto kept = keep_representatives(records, clusters);
  {
    auto out = open_output(dir / "clusters.csv");
    write_cluster_csv(clusters, out);
  }
  write_manifest(kept, taxonomy, dir / "dedup_manifest.jsonl");
  nlohmann::json report = report_base(config, "dedup");
  report["records"] = records.size();
  report["clusters"] = clusters.cluster_count();
  report["removed"] = records.size() - kept.size();
  write_json(dir / "dedup_report.json", report);
  log << "dedup: " << records.size() << " records, " << clusters.cluster_count() << " clusters\n";
  return report;
}

nlohmann::json cmd_filter(const RunConfig& config, std::ostream& log) {
  const double threshold = config.get_double("filter.threshold");
  const fs::path dir = output_dir(config);
  const auto detections = load_detections_csv(config.require_path("paths.detections"));
  std::vector<Detection> kept;
  if (config.has("filter.category")) {
    kept = filter_by_confidence(detections, config.get_string("filter.category"), threshold);
  } else {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
      throw ConfigError("filter.threshold outside [0, 1]");
    }
    for (const auto& d : detections) {
      if (d.confidence > threshold) kept.push_back(d);
    }
  }
  {
    auto out = open_output(dir / "filtered_detections.csv");
    write_detections_csv(kept, out);
  }
  nlohmann::json report = report_base(config, "filter");
  report["input"] = detections.size();
  report["kept"] = kept.size();
  write_json(dir / "filter_report.json", report);
  log << "filter: kept " << kept.size() << " of " << detections.size() << '\n';
  return report;
}

nlohmann::json cmd_geo_eval(const RunConfig& config, std::ostream& log) {
  const fs::path dir = output_dir(config);
  const auto detections = load_detections_csv(config.require_path("paths.detections"));
  const auto events = load_events_csv(config.require_path("paths.events"));
  if (events.empty()) throw DataError("geo-eval: events file is empty");
  const std::string category =
      config.has("geo.category") ? config.get_string("geo.category") : events.front().category;
  const double threshold = config.get_double("geo.threshold");
  const auto x_km = config.get_doubles("geo.x_km");
  const double radius = config.get_double("geo.radius_km");
  const std::size_t trials = config.get_size("geo.trials");
  const std::uint64_t seed = config.get_u64("seed");

  std::vector<Detection> unfiltered;
  for (const auto& d : detections) {
    if (d.category == category) unfiltered.push_back(d);
  }
  const auto filtered = filter_by_confidence(detections, category, threshold);
  const auto curve_all = accuracy_at_km(unfiltered, events, x_km);
  const auto curve_filtered = accuracy_at_km(filtered, events, x_km);
  {
    auto out = open_output(dir / "accuracy_at_km.csv");
    out << "x_km,unfiltered,filtered\n";
    for (std::size_t i = 0; i < x_km.size(); ++i) {
      out << x_km[i] << ',' << curve_all[i] << ',' << curve_filtered[i] << '\n';
    }
  }

  nlohmann::json per_event = nlohmann::json::array();
  double ap_sum = 0.0, baseline_sum = 0.0;
  std::size_t defined = 0;
  for (const auto& e : events) {
    const auto gated = radius_gate(unfiltered, e.location, radius);
    nlohmann::json entry = {{"name", e.name}, {"detections", gated.size()}};
    try {
      const EventApResult r = event_ap(gated, category, trials, seed);
      entry["ap"] = r.ap;
      entry["baseline_ap"] = r.baseline_ap;
      entry["positives"] = r.positives;
      entry["labelled"] = r.count;
      ap_sum += r.ap;
      baseline_sum += r.baseline_ap;
      ++defined;
    } catch (const DataError& err) {
      entry["ap"] = nullptr;
      entry["reason"] = err.what();
    }
    per_event.push_back(entry);
  }

  nlohmann::json report = report_base(config, "geo-eval");
  report["category"] = category;
  report["x_km"] = x_km;
  report["accuracy_unfiltered"] = curve_all;
  report["accuracy_filtered"] = curve_filtered;
  report["events"] = per_event;
  report["shuffle_trials"] = trials;
  report["shuffle_seed"] = seed;
  const auto mean = [defined](double sum) {
    return defined ? nlohmann::json(sum / static_cast<double>(defined)) : nlohmann::json(nullptr);
  };
  report["mean_event_ap"] = mean(ap_sum);
  report["mean_baseline_ap"] = mean(baseline_sum);
  write_json(dir / "geo_report.json", report);
  log << "geo-eval: " << filtered.size() << " of " << unfiltered.size()
      << " detections above threshold, " << defined << " events with AP\n";
  return report;
}

nlohmann::json cmd_monitor(const RunConfig& config, std::ostream& log) {
  const fs::path dir = output_dir(config);
  const std::size_t w = config.get_size("monitor.w");
  const std::size_t smooth = config.get_size("monitor.smooth_window");
  const double threshold = config.get_double("monitor.rti_threshold");
  if (w == 0) throw ConfigError("monitor.w must be positive");
  if (smooth == 0 || smooth % 2 == 0) throw ConfigError("monitor.smooth_window must be odd");
  const DailySeries series = load_series_csv(config.require_path("paths.series"));
  const std::string events_key =
      config.get_path("paths.series_events") ? "paths.series_events" : "paths.events";
  const auto events = load_events_csv(config.require_path(events_key));

  const MrtiReport m = mrti(series, events, w);
  nlohmann::json per_event = nlohmann::json::array();
  for (const auto& e : m.events) {
    nlohmann::json entry = {{"name", e.name}, {"date", e.day.to_string()}, {"rti", optional_json(e.rti)}};
    if (!e.rti) entry["reason"] = e.reason;
    per_event.push_back(entry);
  }
  nlohmann::json peaks = nlohmann::json::array();
  for (Date d : flag_peaks(series, w, threshold)) peaks.push_back(d.to_string());

  {
    auto out = open_output(dir / "rti.csv");
    out << "date,count,rti\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
      const Date d = series.start + static_cast<std::int64_t>(i);
      out << d.to_string() << ',' << series.counts[i] << ',';
      if (i >= w && i + w < series.size()) {
        if (const auto v = rti(series, d, w)) out << *v;
      }
      out << '\n';
    }
  }

  nlohmann::json report = report_base(config, "monitor");
  report["w"] = w;
  report["mrti"] = m.mrti;
  report["defined_events"] = m.defined;
  report["undefined_events"] = m.undefined;
  report["events"] = per_event;
  report["peaks"] = peaks;
  if (const auto other = config.get_path("paths.compare_series")) {
    report["histogram_iou"] = histogram_iou(series, load_series_csv(*other), smooth);
    report["smooth_window"] = smooth;
  }
  write_json(dir / "monitor_report.json", report);
  log << "monitor: mRTI " << m.mrti << " over " << m.defined << " events, " << peaks.size()
      << " peaks\n";
  return report;
}

}  // namespace incidents::cli
