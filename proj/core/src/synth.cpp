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

#include "incidents/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "csv_util.hpp"
#include "incidents/error.hpp"
#include "incidents/random.hpp"
#include "incidents/version.hpp"

namespace incidents {
namespace {

enum Stream : std::uint64_t {
  kCenters = 1,
  kTrain = 2,
  kVal = 3,
  kTest = 4,
  kGeo = 5,
  kBursts = 6,
};

Eigen::VectorXd gaussian_vector(Rng& rng, std::size_t dim, double scale) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal() * scale;
  return v;
}

Eigen::VectorXd unit_vector(Rng& rng, std::size_t dim) {
  Eigen::VectorXd v = gaussian_vector(rng, dim, 1.0);
  while (v.norm() == 0.0) v = gaussian_vector(rng, dim, 1.0);
  return v / v.norm();
}

std::string record_id(const char* prefix, std::size_t n) {
  std::string digits = std::to_string(n);
  return std::string(prefix) + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
}

struct Builder {
  const SynthSpec& spec;
  const Eigen::MatrixXd& incident_centers;
  const Eigen::MatrixXd& place_centers;
  const Eigen::MatrixXd& hard_directions;
  std::vector<float>& data;
  std::uint64_t next_index = 0;

  std::uint64_t push(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(static_cast<float>(v[i]));
    return next_index++;
  }

  double noise_scale(double fraction) const {
    return fraction * spec.sigma / std::sqrt(static_cast<double>(spec.dim));
  }

  Eigen::VectorXd center(std::size_t c, std::size_t p) const {
    return incident_centers.row(static_cast<Eigen::Index>(c)).transpose() +
           place_centers.row(static_cast<Eigen::Index>(p)).transpose();
  }

  // per_class records per incident class plus places_aug per place class.
  std::vector<PartialLabelRecord> make_split(Rng& rng, const char* prefix, std::size_t per_class,
                                             std::size_t places_aug) {
    std::vector<PartialLabelRecord> out;
    const auto n_hard = static_cast<std::size_t>(
        std::llround(spec.hard_negative_fraction * static_cast<double>(per_class)));
    for (std::size_t c = 0; c < spec.n_incident_classes; ++c) {
      for (std::size_t k = 0; k < per_class; ++k) {
        const auto p = static_cast<std::size_t>(rng.uniform_index(spec.n_place_classes));
        const Eigen::VectorXd mu = center(c, p);
        PartialLabelRecord r;
        r.id = record_id(prefix, out.size());
        r.place_pos = p;
        if (k < n_hard) {
          Eigen::VectorXd v;
          do {
            v = mu + spec.hard_negative_offset * spec.sigma *
                         hard_directions.row(static_cast<Eigen::Index>(c)).transpose() +
                gaussian_vector(rng, spec.dim, noise_scale(0.5));
          } while ((v - mu).norm() > 2.0 * spec.sigma);
          r.incident_neg = {c};
          r.embedding_index = push(v);
        } else {
          r.incident_pos = c;
          r.embedding_index = push(mu + gaussian_vector(rng, spec.dim, noise_scale(1.0)));
        }
        out.push_back(std::move(r));
      }
    }
    for (std::size_t p = 0; p < spec.n_place_classes; ++p) {
      for (std::size_t k = 0; k < places_aug; ++k) {
        PartialLabelRecord r;
        r.id = record_id(prefix, out.size());
        r.place_pos = p;
        r.source = RecordSource::kPlacesAug;
        r.embedding_index =
            push(place_centers.row(static_cast<Eigen::Index>(p)).transpose() +
                 gaussian_vector(rng, spec.dim, noise_scale(1.0)));
        out.push_back(std::move(r));
      }
    }
    return out;
  }
};

GeoPoint random_on_sphere(Rng& rng) {
  const double lat = std::asin(2.0 * rng.uniform01() - 1.0) * 180.0 / std::numbers::pi;
  return {lat, rng.uniform(-180.0, 180.0)};
}

void make_geo(const SynthSpec& spec, const std::string& category, SynthWorld& world) {
  Rng rng(derive_seed(spec.seed, kGeo));
  const Date year_start = Date::from_ymd(2018, 1, 1);
  for (std::size_t e = 0; e < spec.geo.events; ++e) {
    GeoEvent ev;
    ev.name = "event-" + std::to_string(e);
    ev.date = year_start + static_cast<std::int64_t>(rng.uniform_index(365));
    ev.location = {rng.uniform(-60.0, 60.0), rng.uniform(-180.0, 180.0)};
    ev.category = category;
    ev.magnitude = std::round(rng.uniform(5.0, 8.0) * 10.0) / 10.0;
    world.events.push_back(ev);
  }
  std::size_t n = 0;
  const auto next_id = [&n] { return record_id("geo-", n++); };
  for (const auto& ev : world.events) {
    for (std::size_t k = 0; k < spec.geo.positives_per_event; ++k) {
      Detection d;
      d.id = next_id();
      d.category = category;
      const bool relevant = rng.uniform01() < spec.geo.relevant_fraction;
      const double u = rng.uniform01();
      d.confidence = relevant ? 0.6 + 0.4 * u : 0.8 * u * u;
      const double spread = spec.geo.positive_spread_km *
                            (relevant ? 1.0 : spec.geo.irrelevant_spread_factor);
      const double distance = std::abs(rng.normal()) * spread;
      d.location = destination_point(ev.location, rng.uniform(0.0, 360.0), distance);
      d.date = ev.date + static_cast<std::int64_t>(rng.uniform_index(7));
      d.label = relevant;
      world.detections.push_back(std::move(d));
    }
  }
  for (std::size_t k = 0; k < spec.geo.background; ++k) {
    Detection d;
    d.id = next_id();
    d.category = category;
    const double u = rng.uniform01();
    d.confidence = u * u * u;
    d.location = random_on_sphere(rng);
    d.date = year_start + static_cast<std::int64_t>(rng.uniform_index(365));
    d.label = rng.uniform01() < 0.05;
    world.detections.push_back(std::move(d));
  }
}

}  // namespace

void SynthSpec::validate() const {
  if (n_incident_classes == 0 || n_place_classes == 0) {
    throw ConfigError("synth: class counts must be positive");
  }
  if (n_train_per_class == 0) throw ConfigError("synth: n_train_per_class must be positive");
  if (dim == 0) throw ConfigError("synth: dim must be positive");
  if (!(separation > 0.0)) throw ConfigError("synth: separation must be positive");
  if (!(place_separation > 0.0)) throw ConfigError("synth: place_separation must be positive");
  if (!(geo.relevant_fraction >= 0.0 && geo.relevant_fraction <= 1.0)) {
    throw ConfigError("synth: relevant_fraction must lie in [0, 1]");
  }
  if (!(geo.irrelevant_spread_factor > 0.0)) {
    throw ConfigError("synth: irrelevant_spread_factor must be positive");
  }
  if (!(sigma > 0.0)) throw ConfigError("synth: sigma must be positive");
  if (!(hard_negative_fraction >= 0.0 && hard_negative_fraction <= 1.0)) {
    throw ConfigError("synth: hard_negative_fraction must lie in [0, 1]");
  }
  if (!(hard_negative_offset >= 0.0 && hard_negative_offset < 2.0)) {
    throw ConfigError("synth: hard_negative_offset must lie in [0, 2)");
  }
  if (!(geo.positive_spread_km > 0.0)) throw ConfigError("synth: positive_spread_km must be positive");
  if (temporal.w == 0 || temporal.burst_length == 0) {
    throw ConfigError("synth: burst window and length must be positive");
  }
  if (!(temporal.baseline_rate > 0.0) || !(temporal.burst_multiplier > 0.0)) {
    throw ConfigError("synth: burst rates must be positive");
  }
  const std::size_t gap = 3 * temporal.w + temporal.burst_length;
  if (temporal.bursts > 0 && temporal.days < 2 * temporal.w + 2 + temporal.bursts * gap) {
    throw ConfigError("synth: too few days for the requested bursts");
  }
}

nlohmann::json SynthSpec::to_json() const {
  return {
      {"seed", seed},
      {"n_incident_classes", n_incident_classes},
      {"n_place_classes", n_place_classes},
      {"n_train_per_class", n_train_per_class},
      {"n_val_per_class", n_val_per_class},
      {"n_test_per_class", n_test_per_class},
      {"places_aug_per_class", places_aug_per_class},
      {"dim", dim},
      {"separation", separation},
      {"place_separation", place_separation},
      {"sigma", sigma},
      {"hard_negative_fraction", hard_negative_fraction},
      {"hard_negative_offset", hard_negative_offset},
      {"geo",
       {{"events", geo.events},
        {"positives_per_event", geo.positives_per_event},
        {"positive_spread_km", geo.positive_spread_km},
        {"relevant_fraction", geo.relevant_fraction},
        {"irrelevant_spread_factor", geo.irrelevant_spread_factor},
        {"background", geo.background}}},
      {"temporal",
       {{"days", temporal.days},
        {"baseline_rate", temporal.baseline_rate},
        {"bursts", temporal.bursts},
        {"burst_multiplier", temporal.burst_multiplier},
        {"burst_length", temporal.burst_length},
        {"w", temporal.w}}},
  };
}

BurstSeries synthesize_bursts(const BurstScenario& scenario, std::uint64_t seed, Date start) {
  Rng rng(seed);
  BurstSeries out;
  out.series.start = start;
  const std::size_t w = scenario.w;
  const std::size_t gap = 3 * w + scenario.burst_length;
  // Onsets live in [w + 1, days - w - 1]; spread them by drawing slack.
  const std::size_t first = w + 1;
  const std::size_t last = scenario.days - w - 1;
  std::vector<std::size_t> onsets;
  if (scenario.bursts > 0) {
    const std::size_t needed = (scenario.bursts - 1) * gap;
    const std::size_t slack = last - first - needed;
    std::vector<std::size_t> extra(scenario.bursts);
    for (auto& e : extra) e = static_cast<std::size_t>(rng.uniform_index(slack + 1));
    std::sort(extra.begin(), extra.end());
    for (std::size_t b = 0; b < scenario.bursts; ++b) onsets.push_back(first + b * gap + extra[b]);
  }
  std::vector<double> rate(scenario.days, scenario.baseline_rate);
  for (std::size_t s : onsets) {
    for (std::size_t d = s; d < std::min(scenario.days, s + scenario.burst_length); ++d) {
      rate[d] = scenario.baseline_rate * scenario.burst_multiplier;
    }
    out.onsets.push_back(start + static_cast<std::int64_t>(s));
  }
  out.series.counts.reserve(scenario.days);
  for (double r : rate) out.series.counts.push_back(rng.poisson(r));
  return out;
}

Eigen::VectorXd SynthWorld::cluster_center(std::size_t incident, std::size_t place) const {
  return incident_centers.row(static_cast<Eigen::Index>(incident)).transpose() +
         place_centers.row(static_cast<Eigen::Index>(place)).transpose();
}

SynthWorld synthesize(const SynthSpec& spec) {
  spec.validate();
  const Taxonomy& full = default_taxonomy();
  if (spec.n_incident_classes > full.size(Task::kIncident) ||
      spec.n_place_classes > full.size(Task::kPlace)) {
    throw ConfigError("synth: more classes requested than the bundled taxonomy has");
  }
  SynthWorld world;
  world.spec = spec;
  world.taxonomy = full.prefix(spec.n_incident_classes, spec.n_place_classes);

  Rng centers_rng(derive_seed(spec.seed, kCenters));
  const auto ic = static_cast<Eigen::Index>(spec.n_incident_classes);
  const auto pc = static_cast<Eigen::Index>(spec.n_place_classes);
  const auto dim = static_cast<Eigen::Index>(spec.dim);
  world.incident_centers.resize(ic, dim);
  world.place_centers.resize(pc, dim);
  Eigen::MatrixXd hard_directions(ic, dim);
  for (Eigen::Index c = 0; c < ic; ++c) {
    world.incident_centers.row(c) = spec.separation * unit_vector(centers_rng, spec.dim).transpose();
  }
  for (Eigen::Index p = 0; p < pc; ++p) {
    world.place_centers.row(p) = spec.place_separation * unit_vector(centers_rng, spec.dim).transpose();
  }
  for (Eigen::Index c = 0; c < ic; ++c) {
    hard_directions.row(c) = unit_vector(centers_rng, spec.dim).transpose();
  }

  std::vector<float> data;
  Builder builder{spec, world.incident_centers, world.place_centers, hard_directions, data};
  Rng train_rng(derive_seed(spec.seed, kTrain));
  Rng val_rng(derive_seed(spec.seed, kVal));
  Rng test_rng(derive_seed(spec.seed, kTest));
  world.train = builder.make_split(train_rng, "tr-", spec.n_train_per_class, spec.places_aug_per_class);
  const auto scaled = [&](std::size_t per_class) {
    return spec.n_train_per_class == 0
               ? 0
               : spec.places_aug_per_class * per_class / spec.n_train_per_class;
  };
  world.val = builder.make_split(val_rng, "va-", spec.n_val_per_class, scaled(spec.n_val_per_class));
  world.test =
      builder.make_split(test_rng, "te-", spec.n_test_per_class, scaled(spec.n_test_per_class));
  world.store = EmbeddingStore(static_cast<std::uint32_t>(spec.dim), std::move(data));

  const std::string& category = world.taxonomy.name(Task::kIncident, 0);
  make_geo(spec, category, world);
  if (spec.temporal.bursts > 0 || spec.temporal.days > 0) {
    world.bursts = synthesize_bursts(spec.temporal, derive_seed(spec.seed, kBursts));
    world.bursts.series.category = category;
  }
  return world;
}

TrainConfig synth_train_config(std::uint64_t seed) {
  TrainConfig config;
  config.seed = seed;
  config.lr = 3e-3;
  config.batch_size = 64;
  return config;
}

std::vector<const PartialLabelRecord*> hard_negatives(std::span<const PartialLabelRecord> records) {
  std::vector<const PartialLabelRecord*> out;
  for (const auto& r : records) {
    if (!r.incident_pos && !r.incident_neg.empty() && r.source != RecordSource::kPlacesAug) {
      out.push_back(&r);
    }
  }
  return out;
}

void write_synth_world(const SynthWorld& world, const std::filesystem::path& dir,
                       const nlohmann::json& report_extra) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  const auto open = [&dir](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("taxonomy.txt");
    out << world.taxonomy.to_text();
  }
  {
    auto out = open("manifest.jsonl");
    write_manifest(world.train, world.taxonomy, out);
  }
  {
    auto out = open("val_manifest.jsonl");
    write_manifest(world.val, world.taxonomy, out);
  }
  {
    auto out = open("test_manifest.jsonl");
    write_manifest(world.test, world.taxonomy, out);
  }
  write_embeddings(world.store, dir / "embeddings.bin");
  {
    auto out = open("events.csv");
    write_events_csv(world.events, out);
  }
  {
    auto out = open("detections.csv");
    write_detections_csv(world.detections, out);
  }
  {
    auto out = open("series.csv");
    write_series_csv(world.bursts.series, out);
  }
  {
    auto out = open("series_events.csv");
    std::vector<GeoEvent> onsets;
    const GeoPoint origin{0.0, 0.0};
    for (std::size_t i = 0; i < world.bursts.onsets.size(); ++i) {
      onsets.push_back({"burst-" + std::to_string(i), world.bursts.onsets[i], origin,
                        world.bursts.series.category, std::nullopt});
    }
    write_events_csv(onsets, out);
  }
  {
    const TrainConfig recipe = synth_train_config(world.spec.seed);
    auto out = open("train.toml");
    out << "seed = " << world.spec.seed << "\n\n"
        << "[paths]\n"
        << "taxonomy = \"taxonomy.txt\"\n"
        << "manifest = \"manifest.jsonl\"\n"
        << "val_manifest = \"val_manifest.jsonl\"\n"
        << "test_manifest = \"test_manifest.jsonl\"\n"
        << "embeddings = \"embeddings.bin\"\n"
        << "events = \"events.csv\"\n"
        << "detections = \"detections.csv\"\n"
        << "series = \"series.csv\"\n"
        << "series_events = \"series_events.csv\"\n\n"
        << "[train]\n"
        << "loss = \"cn\"\n"
        << "use_class_negatives = true\n"
        << "use_places_aug = true\n"
        << "lr = " << detail::format_double(recipe.lr) << "\n"
        << "batch_size = " << recipe.batch_size << "\n"
        << "min_epochs = " << recipe.min_epochs << "\n"
        << "max_epochs = " << recipe.max_epochs << "\n"
        << "hidden = 128\n";
  }
  {
    nlohmann::json report = {
        {"spec", world.spec.to_json()},
        {"version", kGitDescribe},
        {"counts",
         {{"train", world.train.size()},
          {"val", world.val.size()},
          {"test", world.test.size()},
          {"train_hard_negatives", hard_negatives(world.train).size()},
          {"test_hard_negatives", hard_negatives(world.test).size()},
          {"events", world.events.size()},
          {"detections", world.detections.size()},
          {"series_days", world.bursts.series.size()}}},
    };
    nlohmann::json onsets = nlohmann::json::array();
    for (Date d : world.bursts.onsets) onsets.push_back(d.to_string());
    report["burst_onsets"] = onsets;
    for (const auto& [key, value] : report_extra.items()) report[key] = value;
    auto out = open("synth_report.json");
    out << report.dump(2) << '\n';
  }
}

}  // namespace incidents
