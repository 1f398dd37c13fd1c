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

#include "incidents/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "incidents/error.hpp"

namespace incidents {
namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const unsigned char* bytes) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(bytes[i]) << (8 * i);
  }
  return value;
}

void check_finite(std::uint32_t dim, const std::vector<float>& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw DataError("embedding row " + std::to_string(i / dim) +
                      " contains a non-finite value");
    }
  }
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::uint32_t dim, std::vector<float> data)
    : dim_(dim), data_(std::move(data)) {
  if (dim_ == 0) throw DataError("embedding dim must be positive");
  if (data_.size() % dim_ != 0) {
    throw DataError("embedding data size is not a multiple of dim");
  }
  count_ = data_.size() / dim_;
  check_finite(dim_, data_);
}

std::span<const float> EmbeddingStore::row(std::uint64_t index) const {
  if (index >= count_) {
    throw DataError("embedding index " + std::to_string(index) + " out of range (count " +
                    std::to_string(count_) + ")");
  }
  return std::span<const float>(data_).subspan(index * dim_, dim_);
}

void write_embeddings(const EmbeddingStore& store, std::ostream& out) {
  out.write(kEmbeddingMagic, sizeof(kEmbeddingMagic));
  put_le<std::uint32_t>(out, store.dim());
  put_le<std::uint64_t>(out, store.count());
  for (float v : store.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw DataError("failed writing embeddings");
}

void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_embeddings(store, out);
}

EmbeddingStore read_embeddings(std::istream& in, const std::string& source) {
  unsigned char header[20];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (in.gcount() < 8 || std::memcmp(header, kEmbeddingMagic, 8) != 0) {
    throw DataError(source + ": bad magic (not an INCEMB01 embedding file)");
  }
  if (in.gcount() != sizeof(header)) throw DataError(source + ": truncated header");
  const auto dim = get_le<std::uint32_t>(header + 8);
  const auto count = get_le<std::uint64_t>(header + 12);
  if (dim == 0) throw DataError(source + ": dim must be positive");

  const std::uint64_t values = count * dim;
  if (dim != 0 && values / dim != count) throw DataError(source + ": header overflow");
  std::vector<float> data;
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<unsigned char> buf(kChunk * 4);
  data.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(values, 1ULL << 28)));
  std::uint64_t remaining = values;
  while (remaining > 0) {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kChunk));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 4));
    if (static_cast<std::size_t>(in.gcount()) != n * 4) {
      throw DataError(source + ": truncated (expected " + std::to_string(count) + " rows of dim " +
                      std::to_string(dim) + ")");
    }
    for (std::size_t i = 0; i < n; ++i) {
      data.push_back(std::bit_cast<float>(get_le<std::uint32_t>(buf.data() + 4 * i)));
    }
    remaining -= n;
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError(source + ": trailing bytes after embedding data");
  }
  try {
    return EmbeddingStore(dim, std::move(data));
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file " + path.string());
  return read_embeddings(in, path.string());
}

}  // namespace incidents
