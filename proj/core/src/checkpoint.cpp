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

#include "incidents/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "incidents/error.hpp"

namespace incidents {
namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& source) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw DataError(source + ": truncated checkpoint");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_tensor(std::ostream& out, const Eigen::MatrixXd& m) {
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(m(r, c))));
    }
  }
}

Eigen::MatrixXd get_tensor(std::istream& in, const std::string& source) {
  const std::uint32_t rows = get_u32(in, source);
  const std::uint32_t cols = get_u32(in, source);
  if (static_cast<std::uint64_t>(rows) * cols > (1ULL << 32)) {
    throw DataError(source + ": implausible tensor shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      m(r, c) = static_cast<double>(std::bit_cast<float>(get_u32(in, source)));
    }
  }
  return m;
}

DenseLayer get_layer(std::istream& in, const std::string& source) {
  DenseLayer layer;
  layer.weight = get_tensor(in, source);
  const Eigen::MatrixXd bias = get_tensor(in, source);
  if (bias.cols() != 1 || bias.rows() != layer.weight.rows()) {
    throw DataError(source + ": bias shape does not match weight");
  }
  layer.bias = bias.col(0);
  return layer;
}

}  // namespace

std::string fingerprint_hex(std::uint64_t fingerprint) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint));
  return buf;
}

void write_checkpoint(const ModelParams& params, const CheckpointMeta& meta, std::ostream& out) {
  params.validate();
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u32(out, static_cast<std::uint32_t>(params.trunk.size() + 2));
  const auto put_layer = [&out](const DenseLayer& layer) {
    put_tensor(out, layer.weight);
    put_tensor(out, layer.bias);
  };
  for (const auto& layer : params.trunk) put_layer(layer);
  put_layer(params.incident_head);
  put_layer(params.place_head);

  nlohmann::json trailer;
  trailer["format"] = "INCCKPT1";
  trailer["taxonomy_hash"] = fingerprint_hex(meta.taxonomy_fingerprint);
  trailer["loss_variant"] = to_string(meta.variant);
  nlohmann::json hidden = nlohmann::json::array();
  for (const auto& layer : params.trunk) hidden.push_back(layer.weight.rows());
  trailer["hidden"] = hidden;
  trailer["activation"] = "tanh";
  trailer["config"] = meta.config;
  trailer["version"] = meta.version;
  out << trailer.dump();
  if (!out) throw DataError("failed writing checkpoint");
}

void write_checkpoint(const ModelParams& params, const CheckpointMeta& meta,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_checkpoint(params, meta, out);
}

Checkpoint read_checkpoint(std::istream& in, const std::string& source) {
  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw DataError(source + ": bad magic (not an INCCKPT1 checkpoint)");
  }
  const std::uint32_t layers = get_u32(in, source);
  if (layers < 2) throw DataError(source + ": checkpoint needs at least two head layers");
  Checkpoint ckpt;
  for (std::uint32_t i = 0; i + 2 < layers; ++i) ckpt.params.trunk.push_back(get_layer(in, source));
  ckpt.params.incident_head = get_layer(in, source);
  ckpt.params.place_head = get_layer(in, source);
  ckpt.params.validate();

  const std::string rest{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  nlohmann::json trailer;
  try {
    trailer = nlohmann::json::parse(rest);
    ckpt.meta.taxonomy_fingerprint =
        std::stoull(trailer.at("taxonomy_hash").get<std::string>(), nullptr, 16);
    ckpt.meta.variant = parse_loss_variant(trailer.at("loss_variant").get<std::string>());
    ckpt.meta.config = trailer.value("config", nlohmann::json::object());
    ckpt.meta.version = trailer.value("version", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(source + ": bad checkpoint trailer: " + e.what());
  } catch (const ConfigError& e) {
    throw DataError(source + ": bad checkpoint trailer: " + e.what());
  } catch (const std::logic_error& e) {
    throw DataError(source + ": bad checkpoint trailer: " + e.what());
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return read_checkpoint(in, path.string());
}

}  // namespace incidents
