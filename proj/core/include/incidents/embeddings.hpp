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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace incidents {

inline constexpr char kEmbeddingMagic[8] = {'I', 'N', 'C', 'E', 'M', 'B', '0', '1'};

/// Row-major count x dim matrix of finite float32 embeddings. Immutable once
/// built; the constructor rejects non-finite values.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(std::uint32_t dim, std::vector<float> data);

  std::uint32_t dim() const { return dim_; }
  std::uint64_t count() const { return count_; }
  bool empty() const { return count_ == 0; }

  std::span<const float> row(std::uint64_t index) const;
  std::span<const float> data() const { return data_; }

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;

 private:
  std::uint32_t dim_ = 0;
  std::uint64_t count_ = 0;
  std::vector<float> data_;
};

// Layout: magic "INCEMB01", u32 dim, u64 count, count*dim f32, all
// little-endian. Throws DataError on bad magic, truncation, trailing bytes,
// or non-finite rows.
void write_embeddings(const EmbeddingStore& store, std::ostream& out);
void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path);
EmbeddingStore read_embeddings(std::istream& in, const std::string& source = "<stream>");
EmbeddingStore load_embeddings(const std::filesystem::path& path);

}  // namespace incidents
