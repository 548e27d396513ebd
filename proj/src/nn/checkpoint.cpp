// Copyright 2026 The SPADE Authors. All Rights Reserved.
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

#include "spade/nn/checkpoint.hpp"

#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

#include "spade/core/error.hpp"
#include "spade/core/io.hpp"

namespace spade::nn {
namespace {

using json = nlohmann::json;

constexpr char kMagic[4] = {'S', 'P', 'W', '1'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::vector<NamedTensor> all_tensors(const Module& module) {
  auto out = module.named_parameters();
  for (auto& b : module.named_buffers()) out.push_back(b);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Module& module, const std::string& metadata) {
  const auto params = module.named_parameters();
  const auto tensors = all_tensors(module);
  json manifest;
  manifest["metadata"] = metadata;
  manifest["tensors"] = json::array();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    manifest["tensors"].push_back({{"name", tensors[i].first},
                                   {"shape", tensors[i].second.shape()},
                                   {"kind", i < params.size() ? "parameter" : "buffer"}});
  }
  const std::string text = manifest.dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& [name, t] : tensors) {
    for (double v : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

std::string decode_checkpoint(Module& module, const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("checkpoint: bad magic", 0);
  }
  const std::uint64_t len = get_u64(bytes.data() + 4);
  if (len > bytes.size() - 12) throw FormatError("checkpoint: truncated manifest", 4);
  json manifest;
  try {
    manifest = json::parse(bytes.begin() + 12, bytes.begin() + 12 + static_cast<std::ptrdiff_t>(len));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: manifest is not JSON: ") + e.what(), 12);
  }
  auto tensors = all_tensors(module);
  const auto& entries = manifest.at("tensors");
  if (entries.size() != tensors.size()) {
    throw FormatError("checkpoint: " + std::to_string(entries.size()) + " tensors stored, model has " +
                          std::to_string(tensors.size()),
                      12);
  }
  std::size_t offset = 12 + len;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto& [name, t] = tensors[i];
    const auto stored_name = entries[i].at("name").get<std::string>();
    const auto stored_shape = entries[i].at("shape").get<Shape>();
    if (stored_name != name || stored_shape != t.shape()) {
      throw FormatError("checkpoint: entry " + stored_name + " " + to_string(stored_shape) +
                            " does not match model tensor " + name + " " + to_string(t.shape()),
                        offset);
    }
    const std::size_t need = static_cast<std::size_t>(t.numel()) * 8;
    if (bytes.size() - offset < need) throw FormatError("checkpoint: truncated payload", offset);
    auto& data = t.mutable_data();
    for (std::size_t k = 0; k < data.size(); ++k) {
      data[k] = std::bit_cast<double>(get_u64(bytes.data() + offset + 8 * k));
    }
    offset += need;
  }
  if (offset != bytes.size()) throw FormatError("checkpoint: trailing bytes", offset);
  return manifest.value("metadata", std::string("{}"));
}

void save_checkpoint(const Module& module, const std::filesystem::path& path,
                     const std::string& metadata) {
  write_file(path, encode_checkpoint(module, metadata));
}

std::string load_checkpoint(Module& module, const std::filesystem::path& path) {
  return decode_checkpoint(module, read_file(path));
}

}  // namespace spade::nn
