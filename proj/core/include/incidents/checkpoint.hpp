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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "incidents/model.hpp"

namespace incidents {

inline constexpr char kCheckpointMagic[8] = {'I', 'N', 'C', 'C', 'K', 'P', 'T', '1'};

struct CheckpointMeta {
  std::uint64_t taxonomy_fingerprint = 0;
  LossVariant variant = LossVariant::kClassNegative;
  nlohmann::json config = nlohmann::json::object();
  std::string version;
};

struct Checkpoint {
  ModelParams params;
  CheckpointMeta meta;
};

/// Layout (little-endian): magic "INCCKPT1", u32 layer count, then for each
/// dense layer (trunk layers, incident head, place head) two tensors, weight
/// and bias, each written as u32 rows, u32 cols, rows*cols f32 row-major.
/// A UTF-8 JSON trailer runs to end of file.
///
/// Parameters are narrowed to float32 on write. The trailer holds no
/// timestamps, so identical models produce identical bytes.
void write_checkpoint(const ModelParams& params, const CheckpointMeta& meta, std::ostream& out);
void write_checkpoint(const ModelParams& params, const CheckpointMeta& meta,
                      const std::filesystem::path& path);

Checkpoint read_checkpoint(std::istream& in, const std::string& source = "<stream>");
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string fingerprint_hex(std::uint64_t fingerprint);

}  // namespace incidents
