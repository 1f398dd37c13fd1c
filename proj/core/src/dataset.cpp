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

#include "incidents/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "incidents/error.hpp"
#include "incidents/random.hpp"

namespace incidents {
namespace {

using nlohmann::json;

std::optional<std::size_t> resolve_positive(const json& obj, const char* key, Task task,
                                            const Taxonomy& taxonomy) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_array()) {
    if (it->size() > 1) {
      throw DataError(std::string(key) + " lists " + std::to_string(it->size()) +
                      " positives; records are single-label");
    }
    throw DataError(std::string(key) + " must be a string or null");
  }
  if (!it->is_string()) throw DataError(std::string(key) + " must be a string or null");
  const std::string name = normalize_category_name(it->get<std::string>());
  const auto index = taxonomy.index_of(task, name);
  if (!index) {
    throw DataError(std::string("unknown ") + to_string(task) + " category '" +
                    it->get<std::string>() + "'");
  }
  return index;
}

std::vector<std::size_t> resolve_negatives(const json& obj, const char* key, Task task,
                                           const Taxonomy& taxonomy) {
  std::vector<std::size_t> out;
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw DataError(std::string(key) + " must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) throw DataError(std::string(key) + " entries must be strings");
    const auto index = taxonomy.index_of(task, normalize_category_name(v.get<std::string>()));
    if (!index) {
      throw DataError(std::string("unknown ") + to_string(task) + " category '" +
                      v.get<std::string>() + "'");
    }
    out.push_back(*index);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PartialLabelRecord parse_record(const json& obj, const Taxonomy& taxonomy) {
  if (!obj.is_object()) throw DataError("manifest line is not a JSON object");
  PartialLabelRecord r;
  const auto id = obj.find("id");
  if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw DataError("missing or empty string field 'id'");
  }
  r.id = id->get<std::string>();
  const auto idx = obj.find("embedding_index");
  if (idx == obj.end() || !idx->is_number_integer() ||
      (idx->is_number_integer() && !idx->is_number_unsigned() && idx->get<std::int64_t>() < 0)) {
    throw DataError("'embedding_index' must be a non-negative integer");
  }
  r.embedding_index = idx->get<std::uint64_t>();
  r.incident_pos = resolve_positive(obj, "incident_pos", Task::kIncident, taxonomy);
  r.incident_neg = resolve_negatives(obj, "incident_neg", Task::kIncident, taxonomy);
  r.place_pos = resolve_positive(obj, "place_pos", Task::kPlace, taxonomy);
  r.place_neg = resolve_negatives(obj, "place_neg", Task::kPlace, taxonomy);
  if (const auto src = obj.find("source"); src != obj.end() && !src->is_null()) {
    if (!src->is_string()) throw DataError("'source' must be a string");
    r.source = parse_record_source(src->get<std::string>());
  }
  const auto lat = obj.find("lat");
  const auto lon = obj.find("lon");
  const bool has_lat = lat != obj.end() && !lat->is_null();
  const bool has_lon = lon != obj.end() && !lon->is_null();
  if (has_lat != has_lon) throw DataError("'lat' and 'lon' must be given together");
  if (has_lat) {
    if (!lat->is_number() || !lon->is_number()) throw DataError("'lat'/'lon' must be numbers");
    r.location = GeoPoint{lat->get<double>(), lon->get<double>()};
  }
  if (const auto ts = obj.find("timestamp"); ts != obj.end() && !ts->is_null()) {
    if (!ts->is_string()) throw DataError("'timestamp' must be an RFC 3339 string");
    r.timestamp = parse_rfc3339(ts->get<std::string>());
  }
  validate_record(r, taxonomy);
  return r;
}

void fill_from_labels(const PartialLabelRecord& record, Task task, LabelView& view) {
  const auto& pos = record.positive(task);
  if (pos) {
    std::fill(view.weights.begin(), view.weights.end(), 1.0);
    view.targets[*pos] = 1.0;
    return;
  }
  for (std::size_t neg : record.negatives(task)) view.weights[neg] = 1.0;
}

}  // namespace

const char* to_string(RecordSource source) noexcept {
  switch (source) {
    case RecordSource::kDataset:
      return "dataset";
    case RecordSource::kPlacesAug:
      return "places_aug";
    case RecordSource::kStream:
      return "stream";
  }
  return "dataset";
}

RecordSource parse_record_source(std::string_view text) {
  if (text == "dataset") return RecordSource::kDataset;
  if (text == "places_aug") return RecordSource::kPlacesAug;
  if (text == "stream") return RecordSource::kStream;
  throw DataError("unknown record source '" + std::string(text) + "'");
}

void validate_record(const PartialLabelRecord& r, const Taxonomy& taxonomy) {
  if (r.id.empty()) throw DataError("record with empty id");
  for (Task task : {Task::kIncident, Task::kPlace}) {
    const std::size_t n = taxonomy.size(task);
    const auto& pos = r.positive(task);
    const auto& neg = r.negatives(task);
    if (pos && *pos >= n) throw DataError("record " + r.id + ": positive index out of range");
    for (std::size_t i = 0; i < neg.size(); ++i) {
      if (neg[i] >= n) throw DataError("record " + r.id + ": negative index out of range");
      if (i > 0 && neg[i] <= neg[i - 1]) {
        throw DataError("record " + r.id + ": negatives must be sorted and unique");
      }
    }
    if (pos && std::binary_search(neg.begin(), neg.end(), *pos)) {
      throw DataError("record " + r.id + ": " + to_string(task) + " category '" +
                      taxonomy.name(task, *pos) + "' is both positive and negative");
    }
  }
  if (r.source == RecordSource::kPlacesAug && r.incident_pos) {
    throw DataError("record " + r.id + ": places_aug records cannot have an incident positive");
  }
  if (r.location && !is_valid(*r.location)) {
    throw DataError("record " + r.id + ": latitude/longitude out of range");
  }
}

std::vector<PartialLabelRecord> read_manifest(std::istream& in, const Taxonomy& taxonomy,
                                              const std::string& source) {
  std::vector<PartialLabelRecord> records;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        throw DataError(std::string("malformed JSON: ") + e.what());
      }
      auto record = parse_record(obj, taxonomy);
      if (!ids.insert(record.id).second) {
        throw DataError("duplicate id '" + record.id + "'");
      }
      records.push_back(std::move(record));
    } catch (const DataError& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const json::exception& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<PartialLabelRecord> load_manifest(const std::filesystem::path& path,
                                              const Taxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  return read_manifest(in, taxonomy, path.string());
}

void write_manifest(std::span<const PartialLabelRecord> records, const Taxonomy& taxonomy,
                    std::ostream& out) {
  for (const auto& r : records) {
    json obj;
    obj["id"] = r.id;
    obj["embedding_index"] = r.embedding_index;
    for (Task task : {Task::kIncident, Task::kPlace}) {
      const std::string prefix = task == Task::kIncident ? "incident" : "place";
      const auto& pos = r.positive(task);
      obj[prefix + "_pos"] = pos ? json(taxonomy.name(task, *pos)) : json(nullptr);
      json neg = json::array();
      for (std::size_t n : r.negatives(task)) neg.push_back(taxonomy.name(task, n));
      obj[prefix + "_neg"] = std::move(neg);
    }
    obj["source"] = to_string(r.source);
    if (r.location) {
      obj["lat"] = r.location->lat;
      obj["lon"] = r.location->lon;
    }
    if (r.timestamp) obj["timestamp"] = format_rfc3339(*r.timestamp);
    out << obj.dump() << '\n';
  }
  if (!out) throw DataError("failed writing manifest");
}

void write_manifest(std::span<const PartialLabelRecord> records, const Taxonomy& taxonomy,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_manifest(records, taxonomy, out);
}

void check_embedding_indices(std::span<const PartialLabelRecord> records,
                             const EmbeddingStore& store) {
  for (const auto& r : records) {
    if (r.embedding_index >= store.count()) {
      throw DataError("record " + r.id + ": embedding_index " +
                      std::to_string(r.embedding_index) + " >= store count " +
                      std::to_string(store.count()));
    }
  }
}

std::size_t LabelView::supervised() const {
  return static_cast<std::size_t>(std::count(weights.begin(), weights.end(), 1.0));
}

LabelView label_view(const PartialLabelRecord& record, Task task, const Taxonomy& taxonomy) {
  const std::size_t n = taxonomy.size(task);
  LabelView view{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  if (task == Task::kIncident && record.source == RecordSource::kPlacesAug) return view;
  fill_from_labels(record, task, view);
  return view;
}

LabelView eval_label_view(const PartialLabelRecord& record, Task task,
                          const Taxonomy& taxonomy) {
  const std::size_t n = taxonomy.size(task);
  LabelView view{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  if (task == Task::kIncident && record.source == RecordSource::kPlacesAug) {
    std::fill(view.weights.begin(), view.weights.end(), 1.0);
    return view;
  }
  fill_from_labels(record, task, view);
  return view;
}

SplitManifest split(std::span<const PartialLabelRecord> records, std::uint64_t seed,
                    const SplitRatios& ratios) {
  const double parts[3] = {ratios.train, ratios.val, ratios.test};
  for (double r : parts) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("split ratios must be non-negative");
  }
  if (std::abs(parts[0] + parts[1] + parts[2] - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }

  const std::uint64_t salt = mix64(seed);
  std::vector<std::pair<std::uint64_t, const std::string*>> ranked;
  ranked.reserve(records.size());
  for (const auto& r : records) ranked.emplace_back(mix64(fnv1a64(r.id) ^ salt), &r.id);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : *a.second < *b.second;
  });

  // Largest-remainder apportionment of exact counts.
  const std::size_t n = ranked.size();
  std::size_t counts[3];
  double remainders[3];
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = parts[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainders[i] > remainders[best]) best = i;
    }
    ++counts[best];
    remainders[best] = -1.0;
    ++assigned;
  }
  while (assigned > n) {
    for (int i = 2; i >= 0 && assigned > n; --i) {
      if (counts[i] > 0) {
        --counts[i];
        --assigned;
      }
    }
  }

  SplitManifest out;
  std::vector<std::string>* dest[3] = {&out.train, &out.val, &out.test};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < counts[i]; ++k) dest[i]->push_back(*ranked[pos++].second);
    std::sort(dest[i]->begin(), dest[i]->end());
  }
  return out;
}

std::vector<PartialLabelRecord> select_records(std::span<const PartialLabelRecord> records,
                                               std::span<const std::string> ids) {
  const std::unordered_set<std::string> wanted(ids.begin(), ids.end());
  std::vector<PartialLabelRecord> out;
  for (const auto& r : records) {
    if (wanted.contains(r.id)) out.push_back(r);
  }
  return out;
}

std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed,
                                           std::uint64_t epoch) {
  Rng rng(derive_seed(seed, 0x65706f6368ULL + epoch));
  return random_permutation(n, rng);
}

BatchIterator::BatchIterator(std::span<const PartialLabelRecord> records,
                             const EmbeddingStore& store, const Taxonomy& taxonomy,
                             std::size_t batch_size, std::uint64_t seed, std::uint64_t epoch)
    : records_(records),
      store_(store),
      taxonomy_(taxonomy),
      batch_size_(batch_size),
      order_(epoch_permutation(records.size(), seed, epoch)) {
  if (batch_size_ == 0) throw ConfigError("batch_size must be at least 1");
  check_embedding_indices(records, store);
}

std::optional<Batch> BatchIterator::next() {
  if (cursor_ >= order_.size()) return std::nullopt;
  const std::size_t end = std::min(order_.size(), cursor_ + batch_size_);
  Batch batch;
  batch.record_indices.assign(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                              order_.begin() + static_cast<std::ptrdiff_t>(end));
  cursor_ = end;
  batch.embeddings.resize(static_cast<Eigen::Index>(batch.size()), store_.dim());
  batch.incident.reserve(batch.size());
  batch.place.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& record = records_[batch.record_indices[i]];
    const auto row = store_.row(record.embedding_index);
    for (std::size_t j = 0; j < row.size(); ++j) {
      batch.embeddings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    batch.incident.push_back(label_view(record, Task::kIncident, taxonomy_));
    batch.place.push_back(label_view(record, Task::kPlace, taxonomy_));
  }
  return batch;
}

Eigen::MatrixXd gather_embeddings(std::span<const PartialLabelRecord> records,
                                  const EmbeddingStore& store) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(records.size()), store.dim());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto row = store.row(records[i].embedding_index);
    for (std::size_t j = 0; j < row.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return out;
}

}  // namespace incidents
