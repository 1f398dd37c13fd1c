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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace incidents {

enum class Task { kIncident, kPlace };

const char* to_string(Task task) noexcept;

struct Category {
  std::string name;
  // Always starts with `name`; no duplicates.
  std::vector<std::string> synonyms;
};

/// Incident and place vocabularies. Category indices equal file order and are
/// fixed for the lifetime of the object, since label vectors are laid out by
/// them. Immutable after construction.
class Taxonomy {
 public:
  Taxonomy() = default;
  // Validates names (non-empty, lowercase-normalized, unique per task).
  Taxonomy(std::vector<Category> incidents, std::vector<Category> places);

  const std::vector<Category>& categories(Task task) const {
    return task == Task::kIncident ? incidents_ : places_;
  }
  std::size_t size(Task task) const { return categories(task).size(); }
  const std::string& name(Task task, std::size_t index) const {
    return categories(task).at(index).name;
  }
  std::optional<std::size_t> index_of(Task task, std::string_view name) const;

  // Stable hash of both ordered vocabularies; recorded in checkpoints.
  std::uint64_t fingerprint() const;

  // Keeps the first `n_incidents` / `n_places` categories.
  Taxonomy prefix(std::size_t n_incidents, std::size_t n_places) const;

  // Serializes in the taxonomy file format.
  std::string to_text() const;

 private:
  std::vector<Category> incidents_;
  std::vector<Category> places_;
  std::unordered_map<std::string, std::size_t> incident_index_;
  std::unordered_map<std::string, std::size_t> place_index_;
};

// Lowercases, trims, and collapses internal whitespace runs.
std::string normalize_category_name(std::string_view raw);

// Parses the `[incidents]` / `[places]` text format. `source` prefixes error
// messages ("source:line: ..."). Throws DataError.
Taxonomy parse_taxonomy(std::string_view text, std::string_view source = "<memory>");
Taxonomy load_taxonomy(const std::filesystem::path& path);

// The vocabulary shipped with the library (43 incidents, 49 places).
const Taxonomy& default_taxonomy();
std::filesystem::path default_taxonomy_path();

inline constexpr std::string_view kDefaultQueryTemplate = "{incident} in {place}";

struct QueryPair {
  std::string incident;
  std::string place;
  std::vector<std::string> queries;
};

/// One pair per (incident, place); each pair's queries are the cross-product
/// of incident synonyms and place synonyms rendered through `query_template`,
/// which must contain both `{incident}` and `{place}`.
std::vector<QueryPair> generate_query_pairs(
    const Taxonomy& taxonomy, std::string_view query_template = kDefaultQueryTemplate);

inline constexpr double kQcAcceptThreshold = 0.85;

struct QcDecision {
  bool accepted = false;
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Accepts a batch iff control-image accuracy is strictly above 85%.
QcDecision qc_accept_batch(const std::vector<bool>& worker_answers,
                           const std::vector<bool>& control_truth);

}  // namespace incidents
