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

#include "incidents/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "incidents/error.hpp"

extern char** environ;

namespace incidents::cli {
namespace {

struct KeyInfo {
  const char* key;
  const char* default_value;  // nullptr when there is no default
  bool is_path;
};

// clang-format off
const KeyInfo kKeys[] = {
    {"seed", "0", false},
    {"threads", "1", false},
    {"out", "out", true},
    {"quiet", "false", false},

    {"paths.taxonomy", nullptr, true},
    {"paths.manifest", nullptr, true},
    {"paths.val_manifest", nullptr, true},
    {"paths.test_manifest", nullptr, true},
    {"paths.embeddings", nullptr, true},
    {"paths.checkpoint", nullptr, true},
    {"paths.events", nullptr, true},
    {"paths.detections", nullptr, true},
    {"paths.series", nullptr, true},
    {"paths.series_events", nullptr, true},
    {"paths.compare_series", nullptr, true},

    {"train.loss", "cn", false},
    {"train.use_class_negatives", "true", false},
    {"train.use_places_aug", "true", false},
    {"train.lr", "0.0001", false},
    {"train.batch_size", "256", false},
    {"train.min_epochs", "10", false},
    {"train.max_epochs", "30", false},
    {"train.hidden", "128", false},
    {"train.min_improvement", "0.0001", false},
    {"train.patience", "3", false},
    {"train.beta1", "0.9", false},
    {"train.beta2", "0.999", false},
    {"train.epsilon", "1e-8", false},

    {"eval.augmented", "false", false},
    {"eval.table1", "false", false},
    {"eval.threshold", "0.5", false},
    {"eval.wide_hidden", "512", false},

    {"dedup.radius", "0.1", false},
    {"dedup.metric", "cosine_distance", false},
    {"dedup.strategy", "brute_force", false},

    {"filter.category", nullptr, false},
    {"filter.threshold", "0.5", false},

    {"geo.category", nullptr, false},
    {"geo.threshold", "0.5", false},
    {"geo.x_km", "1,5,10,25,50,100,200,500,750,1000,2500,5000,10000,20000", false},
    {"geo.radius_km", "250", false},
    {"geo.trials", "100", false},

    {"monitor.w", "7", false},
    {"monitor.smooth_window", "7", false},
    {"monitor.rti_threshold", "2", false},

    {"synth.n_incident_classes", "6", false},
    {"synth.n_place_classes", "4", false},
    {"synth.n_train_per_class", "80", false},
    {"synth.n_val_per_class", "20", false},
    {"synth.n_test_per_class", "40", false},
    {"synth.places_aug_per_class", "40", false},
    {"synth.dim", "64", false},
    {"synth.separation", "3", false},
    {"synth.place_separation", "0.5", false},
    {"synth.sigma", "1", false},
    {"synth.hard_negative_fraction", "0.3", false},
    {"synth.hard_negative_offset", "1", false},
    {"synth.geo_events", "5", false},
    {"synth.geo_positives_per_event", "40", false},
    {"synth.geo_positive_spread_km", "35", false},
    {"synth.geo_relevant_fraction", "0.7", false},
    {"synth.geo_irrelevant_spread_factor", "5", false},
    {"synth.geo_background", "400", false},
    {"synth.days", "120", false},
    {"synth.baseline_rate", "20", false},
    {"synth.bursts", "2", false},
    {"synth.burst_multiplier", "10", false},
    {"synth.burst_length", "7", false},
};
// clang-format on

const KeyInfo* key_info(std::string_view key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing comment that is not inside a string.
std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && in_string) {
      ++i;
    } else if (line[i] == '"') {
      in_string = !in_string;
    } else if (line[i] == '#' && !in_string) {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

std::string parse_string(std::string_view v, const std::string& ctx) {
  std::string out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] == '\\') {
      if (i + 2 >= v.size()) throw ConfigError(ctx + "dangling escape");
      const char c = v[++i];
      if (c == 'n') {
        out += '\n';
      } else if (c == 't') {
        out += '\t';
      } else if (c == '"' || c == '\\') {
        out += c;
      } else {
        throw ConfigError(ctx + "unsupported escape \\" + std::string(1, c));
      }
    } else if (v[i] == '"') {
      throw ConfigError(ctx + "unexpected quote");
    } else {
      out += v[i];
    }
  }
  return out;
}

std::string parse_value(std::string_view raw, const std::string& ctx) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError(ctx + "missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ConfigError(ctx + "unterminated string");
    return parse_string(v, ctx);
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw ConfigError(ctx + "unterminated array");
    std::string out;
    std::stringstream items(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;
      if (!out.empty()) out += ',';
      out += t.front() == '"' ? parse_value(t, ctx) : t;
    }
    return out;
  }
  return v;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw ConfigError(key + ": expected " + what + ", got '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, const char* what) {
  T out{};
  const char* begin = value.data();
  const char* end = begin + value.size();
  if (!value.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (value.empty() || ec != std::errc() || ptr != end) bad_value(key, value, what);
  return out;
}

// Accepts "a,b" and "[a, b]".
std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string body = trim(value);
  if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
    body = body.substr(1, body.size() - 2);
  }
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& k : kKeys) {
    if (k.default_value) entries_[k.key] = {k.default_value, "default", {}};
  }
}

void RunConfig::load_text(std::string_view text, const std::string& source,
                          const std::filesystem::path& base_dir) {
  std::string section;
  std::stringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string ctx = source + ":" + std::to_string(line_no) + ": ";
    const std::string content = trim(strip_comment(line));
    if (content.empty()) continue;
    if (content.front() == '[') {
      if (content.back() != ']') throw ConfigError(ctx + "malformed section header");
      section = trim(std::string_view(content).substr(1, content.size() - 2));
      if (section.empty()) throw ConfigError(ctx + "empty section name");
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(ctx + "expected key = value");
    const std::string name = trim(std::string_view(content).substr(0, eq));
    if (name.empty()) throw ConfigError(ctx + "empty key");
    const std::string key = section.empty() ? name : section + "." + name;
    const std::string value = parse_value(std::string_view(content).substr(eq + 1), ctx);
    try {
      set(key, value, source, base_dir);
    } catch (const ConfigError& err) {
      throw ConfigError(ctx + err.what());
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  load_text(buffer.str(), path.string(), path.parent_path());
}

void RunConfig::load_env(const std::map<std::string, std::string>& env) {
  static constexpr std::string_view kPrefix = "INCIDENT_";
  for (const auto& [name, value] : env) {
    if (name.rfind(kPrefix, 0) != 0) continue;
    std::string rest = name.substr(kPrefix.size());
    std::transform(rest.begin(), rest.end(), rest.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::string key = rest;
    if (!key_info(key)) {
      const auto us = rest.find('_');
      if (us != std::string::npos) key = rest.substr(0, us) + "." + rest.substr(us + 1);
    }
    if (!key_info(key)) throw ConfigError("environment variable " + name + " matches no setting");
    set(key, value, "env:" + name);
  }
}

std::map<std::string, std::string> RunConfig::process_env() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string_view entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
  }
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value, const std::string& origin,
                    const std::filesystem::path& base_dir) {
  if (!key_info(key)) throw ConfigError("unknown setting '" + key + "'");
  entries_[key] = {value, origin, base_dir};
}

const RunConfig::Entry* RunConfig::find(const std::string& key) const {
  if (!key_info(key)) throw ConfigError("unknown setting '" + key + "'");
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const RunConfig::Entry& RunConfig::require(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError("missing required setting '" + key + "'");
  return *e;
}

bool RunConfig::has(const std::string& key) const { return find(key) != nullptr; }

std::string RunConfig::get_string(const std::string& key) const { return require(key).value; }

double RunConfig::get_double(const std::string& key) const {
  return parse_number<double>(key, require(key).value, "a number");
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  return parse_number<std::uint64_t>(key, require(key).value, "a non-negative integer");
}

std::size_t RunConfig::get_size(const std::string& key) const {
  return parse_number<std::size_t>(key, require(key).value, "a non-negative integer");
}

int RunConfig::get_int(const std::string& key) const {
  return parse_number<int>(key, require(key).value, "an integer");
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = require(key).value;
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true or false");
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(require(key).value)) {
    out.push_back(parse_number<double>(key, item, "a list of numbers"));
  }
  return out;
}

std::vector<std::size_t> RunConfig::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(require(key).value)) {
    out.push_back(parse_number<std::size_t>(key, item, "a list of non-negative integers"));
  }
  return out;
}

std::optional<std::filesystem::path> RunConfig::get_path(const std::string& key) const {
  const Entry* e = find(key);
  if (!e || e->value.empty()) return std::nullopt;
  std::filesystem::path p(e->value);
  if (p.is_relative() && !e->base_dir.empty()) p = e->base_dir / p;
  return p.lexically_normal();
}

std::filesystem::path RunConfig::require_path(const std::string& key) const {
  auto p = get_path(key);
  if (!p) throw ConfigError("missing required setting '" + key + "'");
  return *p;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& k : kKeys) {
    const auto it = entries_.find(k.key);
    if (it == entries_.end()) continue;
    out[k.key] = k.is_path ? get_path(k.key)->generic_string() : it->second.value;
  }
  return out;
}

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& k : kKeys) out.emplace_back(k.key);
    return out;
  }();
  return keys;
}

}  // namespace incidents::cli
