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

#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "incidents/checkpoint.hpp"
#include "incidents/error.hpp"

namespace incidents {
namespace {

ModelParams small_model() {
  ModelShape s;
  s.input_dim = 3;
  s.hidden = {4};
  s.incident_classes = 2;
  s.place_classes = 2;
  return init_xavier_uniform(s, 7);
}

std::string serialize(const ModelParams& p, const CheckpointMeta& meta) {
  std::ostringstream out;
  write_checkpoint(p, meta, out);
  return out.str();
}

TEST(CheckpointTest, RoundTripNarrowsToFloat) {
  const ModelParams p = small_model();
  CheckpointMeta meta;
  meta.taxonomy_fingerprint = 0x1234abcdULL;
  meta.config = {{"lr", 0.001}};
  meta.version = "test";
  std::istringstream in(serialize(p, meta));
  const Checkpoint back = read_checkpoint(in);
  EXPECT_EQ(back.meta.taxonomy_fingerprint, meta.taxonomy_fingerprint);
  EXPECT_EQ(back.meta.config, meta.config);
  EXPECT_EQ(back.meta.version, "test");
  const auto a = p.tensors();
  const auto b = back.params.tensors();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t j = 0; j < a[k].size(); ++j) {
      EXPECT_EQ(b[k][j], static_cast<double>(static_cast<float>(a[k][j])));
    }
  }
}

TEST(CheckpointTest, ByteStable) {
  const ModelParams p = small_model();
  EXPECT_EQ(serialize(p, {}), serialize(p, {}));
  EXPECT_EQ(serialize(p, {}).substr(0, 8), "INCCKPT1");
}

TEST(CheckpointTest, CorruptionRaisesDataError) {
  const std::string good = serialize(small_model(), {});
  std::string bad_magic = good;
  bad_magic[3] = 'X';
  std::istringstream a(bad_magic);
  EXPECT_THROW(read_checkpoint(a), DataError);

  std::istringstream b(good.substr(0, 40));
  EXPECT_THROW(read_checkpoint(b), DataError);

  std::istringstream c(good.substr(0, good.size() - 3));
  EXPECT_THROW(read_checkpoint(c), DataError);

  EXPECT_THROW(load_checkpoint("/nonexistent/model.bin"), DataError);
}

TEST(CheckpointTest, FingerprintHex) {
  EXPECT_EQ(fingerprint_hex(0xabcULL), "0000000000000abc");
}

}  // namespace
}  // namespace incidents
