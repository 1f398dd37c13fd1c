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
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "incidents/civil_time.hpp"
#include "incidents/dataset.hpp"
#include "incidents/embeddings.hpp"
#include "incidents/geo.hpp"
#include "incidents/taxonomy.hpp"
#include "incidents/temporal.hpp"
#include "incidents/trainer.hpp"

namespace incidents {

struct GeoScenario {
  std::size_t events = 5;
  std::size_t positives_per_event = 40;
  // Share of near-event detections that are relevant. The rest score lower
  // and scatter `irrelevant_spread_factor` times wider.
  double relevant_fraction = 0.7;
  double irrelevant_spread_factor = 5.0;
  double positive_spread_km = 35.0;
  std::size_t background = 400;
};

struct BurstScenario {
  std::size_t days = 120;
  double baseline_rate = 20.0;
  std::size_t bursts = 2;
  double burst_multiplier = 10.0;
  std::size_t burst_length = 7;
  std::size_t w = kDefaultRtiWindow;
};

/// Parameters of the synthetic benchmark. Each incident class contributes
/// `n_train_per_class` training records of which a `hard_negative_fraction`
/// share are hard negatives: class-negative records drawn next to that class
/// cluster, displaced along a class-specific direction.
struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t n_incident_classes = 6;
  std::size_t n_place_classes = 4;
  std::size_t n_train_per_class = 80;
  std::size_t n_val_per_class = 20;
  std::size_t n_test_per_class = 40;
  std::size_t places_aug_per_class = 40;
  std::size_t dim = 64;
  double separation = 3.0;
  // Norm of the place centers; places overlap more than incidents.
  double place_separation = 0.5;
  double sigma = 1.0;
  double hard_negative_fraction = 0.3;
  // Displacement of hard negatives along their class direction, in sigma.
  double hard_negative_offset = 1.0;
  GeoScenario geo;
  BurstScenario temporal;

  // Throws ConfigError.
  void validate() const;
  nlohmann::json to_json() const;
};

struct BurstSeries {
  DailySeries series;
  std::vector<Date> onsets;
};

/// Poisson baseline with injected bursts. Onsets are at least 3w days apart
/// and leave a full window of coverage on both sides.
BurstSeries synthesize_bursts(const BurstScenario& scenario, std::uint64_t seed,
                              Date start = Date::from_ymd(2018, 1, 1));

struct SynthWorld {
  SynthSpec spec;
  Taxonomy taxonomy;
  std::vector<PartialLabelRecord> train;
  std::vector<PartialLabelRecord> val;
  std::vector<PartialLabelRecord> test;
  EmbeddingStore store;
  Eigen::MatrixXd incident_centers;  // rows = classes
  Eigen::MatrixXd place_centers;
  std::vector<GeoEvent> events;
  std::vector<Detection> detections;
  BurstSeries bursts;

  // Center of the incident/place cluster a record was drawn around.
  Eigen::VectorXd cluster_center(std::size_t incident, std::size_t place) const;
};

// Deterministic given every SynthSpec field, seed included.
SynthWorld synthesize(const SynthSpec& spec);

// Hard negatives in `records`: negatives-only incident records.
std::vector<const PartialLabelRecord*> hard_negatives(std::span<const PartialLabelRecord> records);

/// Training recipe for the synthetic benchmark: defaults with a larger step
/// and smaller batches, sized for a few hundred records.
TrainConfig synth_train_config(std::uint64_t seed);

/// Writes taxonomy.txt, manifest.jsonl, val_manifest.jsonl,
/// test_manifest.jsonl, embeddings.bin, events.csv, detections.csv,
/// series.csv, series_events.csv, train.toml and synth_report.json.
void write_synth_world(const SynthWorld& world, const std::filesystem::path& dir,
                       const nlohmann::json& report_extra = {});

}  // namespace incidents
