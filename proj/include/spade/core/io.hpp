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

#ifndef SPADE_CORE_IO_HPP_
#define SPADE_CORE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spade/core/types.hpp"

namespace spade {

// FDR1 layout: "FDR1" | u32 width | u32 height | u8 space tag |
// f32 values (row-major) | u8 mask (row-major), all little-endian.

std::vector<std::uint8_t> encode_raster(const DepthRaster& raster);
/// Throws FormatError with the offending byte offset.
DepthRaster decode_raster(std::span<const std::uint8_t> bytes);

DepthRaster read_raster(const std::filesystem::path& path);
void write_raster(const DepthRaster& raster, const std::filesystem::path& path);

/// Scale maps travel as FDR1 with the unitless tag; mask = known.
ScaleMap read_scale_map(const std::filesystem::path& path);
void write_scale_map(const ScaleMap& map, const std::filesystem::path& path);

/// Guide images travel as FDR1 with the unitless tag and a full mask.
Image read_image(const std::filesystem::path& path);
void write_image(const Image& image, const std::filesystem::path& path);

/// CSV with header "u,v,depth_m", LF line endings.
std::string format_points_csv(const SparsePointSet& points);
SparsePointSet parse_points_csv(const std::string& text);
SparsePointSet read_points(const std::filesystem::path& path);
void write_points(const SparsePointSet& points,
                  const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace spade

#endif  // SPADE_CORE_IO_HPP_
