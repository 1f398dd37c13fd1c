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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace incidents::cli {

/// Flat key/value configuration assembled from layers. Keys are dotted
/// ("train.lr") or bare for top-level settings ("seed"). Later layers win:
/// file, then INCIDENT_* environment variables, then command-line flags.
class RunConfig {
 public:
  RunConfig();

  // TOML-like text: [section] headers, key = value lines, # comments.
  // Strings are double quoted; arrays are [a, b]. Relative paths resolve
  // against `base_dir`. Throws ConfigError with "source:line:" context.
  void load_text(std::string_view text, const std::string& source,
                 const std::filesystem::path& base_dir);
  void load_file(const std::filesystem::path& path);

  // INCIDENT_TRAIN_LR=... sets train.lr; INCIDENT_SEED sets seed.
  void load_env(const std::map<std::string, std::string>& env);
  static std::map<std::string, std::string> process_env();

  // Unknown keys raise ConfigError.
  void set(const std::string& key, const std::string& value, const std::string& origin,
           const std::filesystem::path& base_dir = {});

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;
  // Empty when unset.
  std::optional<std::filesystem::path> get_path(const std::string& key) const;
  std::filesystem::path require_path(const std::string& key) const;

  // Every key with its resolved value; paths are shown resolved.
  nlohmann::json to_json() const;

  static const std::vector<std::string>& known_keys();

 private:
  struct Entry {
    std::string value;
    std::string origin;
    std::filesystem::path base_dir;
  };
  const Entry* find(const std::string& key) const;
  const Entry& require(const std::string& key) const;

  std::map<std::string, Entry> entries_;
};

}  // namespace incidents::cli
