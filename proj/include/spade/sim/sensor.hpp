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

#ifndef SPADE_SIM_SENSOR_HPP_
#define SPADE_SIM_SENSOR_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "spade/core/types.hpp"

namespace spade::sim {

enum class PatternKind { kFeatureLike, kUniformGrid, kSonarLine, kDvl4, kLaser2 };

std::string to_string(PatternKind kind);
/// Accepts "feature_like", "uniform_grid", "sonar_line", "dvl4", "laser2".
PatternKind parse_pattern_kind(const std::string& name);

struct PatternSpec {
  PatternKind kind = PatternKind::kFeatureLike;
  int count = 250;            // feature_like target count, sonar_line points
  int grid_rows = 10;
  int grid_cols = 10;
  int sonar_row = -1;         // -1: H / 2
  int sonar_jitter = 5;       // pixels, uniform in [-j, j]
  double dvl_fraction = 0.2;  // square side as a fraction of min(H, W)
  double laser_baseline = 0.1;   // m
  double laser_max_range = 3.0;  // m
  std::uint64_t seed = 0;

  /// Throws ConfigError on non-positive parameters.
  void validate() const;
};

struct SampleResult {
  SparsePointSet points;
  std::size_t dropped = 0;  // pattern pixels with no valid ground truth nearby
};

/// Samples ground-truth depth at the pattern's pixels. `guide` drives
/// feature_like sampling (falls back to the depth raster's own gradient when
/// absent); `intrinsics` is required for laser2. Pixels on invalid ground
/// truth move to the nearest valid pixel within 3 px or are dropped.
SampleResult sample_pattern(const DepthRaster& gt, const PatternSpec& spec,
                            const Image* guide = nullptr,
                            const std::optional<CameraIntrinsics>& intrinsics = std::nullopt);

/// Seeded uniform subset. The same seed with decreasing counts yields nested
/// subsets (shuffle once, keep a prefix).
SparsePointSet subsample(const SparsePointSet& pts, std::size_t keep, std::uint64_t seed);
SparsePointSet subsample_fraction(const SparsePointSet& pts, double fraction, std::uint64_t seed);

/// Continuous column of a laser spot on row cy for a ray parallel to the
/// optical axis at lateral offset x0 (m). nullopt if no crossing is found.
std::optional<double> laser_column(const DepthRaster& gt, const CameraIntrinsics& k, double x0);

}  // namespace spade::sim

#endif  // SPADE_SIM_SENSOR_HPP_
