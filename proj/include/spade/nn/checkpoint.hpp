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

#ifndef SPADE_NN_CHECKPOINT_HPP_
#define SPADE_NN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spade/nn/module.hpp"

namespace spade::nn {

/// SPW1 layout: "SPW1" | u64 manifest length | manifest JSON | f64 LE
/// buffers in manifest order. The manifest lists every parameter and buffer
/// with its shape, plus a free-form metadata string (JSON text).
std::vector<std::uint8_t> encode_checkpoint(const Module& module, const std::string& metadata = "{}");
/// Copies values into the module's tensors. Names and shapes must match
/// exactly. Returns the stored metadata text.
std::string decode_checkpoint(Module& module, const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Module& module, const std::filesystem::path& path,
                     const std::string& metadata = "{}");
std::string load_checkpoint(Module& module, const std::filesystem::path& path);

}  // namespace spade::nn

#endif  // SPADE_NN_CHECKPOINT_HPP_
