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

#include "incidents/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "incidents/error.hpp"
#include "incidents/random.hpp"

namespace incidents {
namespace detail {
extern const std::string_view kDefaultTaxonomyText;
}  // namespace detail

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

void index_categories(const std::vector<Category>& cats, Task task,
                      std::unordered_map<std::string, std::size_t>& index) {
  for (std::size_t i = 0; i < cats.size(); ++i) {
    const auto& name = cats[i].name;
    if (name.empty()) {
      throw DataError(std::string("empty ") + to_string(task) + " category name");
    }
    if (normalize_category_name(name) != name) {
      throw DataError("category name '" + name + "' is not normalized");
    }
    if (!index.emplace(name, i).second) {
      throw DataError(std::string("duplicate ") + to_string(task) + " category '" +
                      name + "'");
    }
  }
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

const char* to_string(Task task) noexcept {
  return task == Task::kIncident ? "incident" : "place";
}

std::string normalize_category_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : trim(raw)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

Taxonomy::Taxonomy(std::vector<Category> incidents, std::vector<Category> places)
    : incidents_(std::move(incidents)), places_(std::move(places)) {
  index_categories(incidents_, Task::kIncident, incident_index_);
  index_categories(places_, Task::kPlace, place_index_);
  for (auto* cats : {&incidents_, &places_}) {
    for (auto& cat : *cats) {
      if (cat.synonyms.empty() || cat.synonyms.front() != cat.name) {
        cat.synonyms.insert(cat.synonyms.begin(), cat.name);
      }
    }
  }
}

std::optional<std::size_t> Taxonomy::index_of(Task task, std::string_view name) const {
  const auto& index = task == Task::kIncident ? incident_index_ : place_index_;
  const auto it = index.find(std::string(name));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Taxonomy::fingerprint() const {
  std::uint64_t h = fnv1a64("incidents-taxonomy-v1");
  for (const auto& cat : incidents_) h = fnv1a64(cat.name + '\n', h);
  h = fnv1a64("--places--\n", h);
  for (const auto& cat : places_) h = fnv1a64(cat.name + '\n', h);
  return h;
}

Taxonomy Taxonomy::prefix(std::size_t n_incidents, std::size_t n_places) const {
  if (n_incidents > incidents_.size() || n_places > places_.size()) {
    throw ConfigError("taxonomy prefix larger than the taxonomy");
  }
  return Taxonomy({incidents_.begin(), incidents_.begin() + static_cast<std::ptrdiff_t>(n_incidents)},
                  {places_.begin(), places_.begin() + static_cast<std::ptrdiff_t>(n_places)});
}

std::string Taxonomy::to_text() const {
  std::ostringstream out;
  const auto emit = [&out](const std::vector<Category>& cats) {
    for (const auto& cat : cats) {
      out << cat.name << ':';
      for (std::size_t i = 1; i < cat.synonyms.size(); ++i) {
        out << (i == 1 ? " " : ", ") << cat.synonyms[i];
      }
      out << '\n';
    }
  };
  out << "[incidents]\n";
  emit(incidents_);
  out << "\n[places]\n";
  emit(places_);
  return out.str();
}

Taxonomy parse_taxonomy(std::string_view text, std::string_view source) {
  std::vector<Category> incidents;
  std::vector<Category> places;
  std::vector<Category>* current = nullptr;
  std::unordered_map<std::string, std::size_t> seen_incidents;
  std::unordered_map<std::string, std::size_t> seen_places;

  const auto fail = [&](std::size_t line_no, const std::string& msg) -> DataError {
    return DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + msg);
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line == "[incidents]") {
        current = &incidents;
      } else if (line == "[places]") {
        current = &places;
      } else {
        throw fail(line_no, "unknown section " + std::string(line));
      }
      continue;
    }
    if (current == nullptr) {
      throw fail(line_no, "category outside of a [incidents] or [places] section");
    }

    const auto colon = line.find(':');
    Category cat;
    cat.name = normalize_category_name(line.substr(0, colon));
    if (cat.name.empty()) throw fail(line_no, "empty category name");
    if (cat.name.find(',') != std::string::npos) {
      throw fail(line_no, "category name may not contain ','");
    }
    cat.synonyms.push_back(cat.name);
    if (colon != std::string_view::npos) {
      std::string_view rest = line.substr(colon + 1);
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string syn = normalize_category_name(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (syn.empty()) continue;
        if (std::find(cat.synonyms.begin(), cat.synonyms.end(), syn) == cat.synonyms.end()) {
          cat.synonyms.push_back(syn);
        }
      }
    }

    auto& seen = current == &incidents ? seen_incidents : seen_places;
    if (const auto [it, inserted] = seen.emplace(cat.name, line_no); !inserted) {
      throw fail(line_no, "duplicate category '" + cat.name + "' (first defined on line " +
                              std::to_string(it->second) + ")");
    }
    current->push_back(std::move(cat));
  }
  return Taxonomy(std::move(incidents), std::move(places));
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open taxonomy file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_taxonomy(buf.str(), path.string());
}

const Taxonomy& default_taxonomy() {
  static const Taxonomy taxonomy =
      parse_taxonomy(detail::kDefaultTaxonomyText, "<bundled taxonomy>");
  return taxonomy;
}

std::filesystem::path default_taxonomy_path() {
  if (const char* dir = std::getenv("INCIDENTS_DATA_DIR"); dir != nullptr && *dir) {
    return std::filesystem::path(dir) / "default_taxonomy.txt";
  }
  return std::filesystem::path(INCIDENTS_SOURCE_DATA_DIR) / "default_taxonomy.txt";
}

std::vector<QueryPair> generate_query_pairs(const Taxonomy& taxonomy,
                                            std::string_view query_template) {
  if (query_template.find("{incident}") == std::string_view::npos ||
      query_template.find("{place}") == std::string_view::npos) {
    throw ConfigError("query template must contain {incident} and {place}");
  }
  std::vector<QueryPair> pairs;
  pairs.reserve(taxonomy.size(Task::kIncident) * taxonomy.size(Task::kPlace));
  for (const auto& incident : taxonomy.categories(Task::kIncident)) {
    for (const auto& place : taxonomy.categories(Task::kPlace)) {
      QueryPair pair{incident.name, place.name, {}};
      pair.queries.reserve(incident.synonyms.size() * place.synonyms.size());
      for (const auto& isyn : incident.synonyms) {
        for (const auto& psyn : place.synonyms) {
          std::string q(query_template);
          replace_all(q, "{incident}", isyn);
          replace_all(q, "{place}", psyn);
          pair.queries.push_back(std::move(q));
        }
      }
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

QcDecision qc_accept_batch(const std::vector<bool>& worker_answers,
                           const std::vector<bool>& control_truth) {
  if (worker_answers.size() != control_truth.size()) {
    throw DataError("qc: " + std::to_string(worker_answers.size()) + " answers for " +
                    std::to_string(control_truth.size()) + " control images");
  }
  if (control_truth.empty()) throw DataError("qc: empty control set");
  QcDecision d;
  d.total = control_truth.size();
  for (std::size_t i = 0; i < d.total; ++i) {
    if (worker_answers[i] == control_truth[i]) ++d.correct;
  }
  d.accuracy = static_cast<double>(d.correct) / static_cast<double>(d.total);
  d.accepted = d.accuracy > kQcAcceptThreshold;
  return d;
}

}  // namespace incidents
