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

#ifndef SPADE_SYNTH_SCENE_HPP_
#define SPADE_SYNTH_SCENE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "spade/core/types.hpp"

namespace spade::synth {

/// Smooth 2-D value noise in [-1, 1]: random lattice values every
/// `wavelength` pixels, blended with a quintic fade.
class ValueNoise {
 public:
  ValueNoise(std::uint64_t seed, double wavelength, int width, int height);
  double operator()(double u, double v) const;

 private:
  double wavelength_;
  int cols_, rows_;
  std::vector<double> lattice_;
};

enum class Layout { kPlane, kCanyon, kSeafloorBumps, kFrameWithRopes };

std::string to_string(Layout layout);
Layout parse_layout(const std::string& name);

struct SceneSpec {
  Layout layout = Layout::kSeafloorBumps;
  int width = 96;
  int height = 64;
  double min_depth = 1.0;  // m
  double max_depth = 6.0;  // m
  double far_cap = 10.0;   // m
  double texture_wavelength = 6.0;  // px
  std::uint64_t seed = 0;

  void validate() const;
};

struct Scene {
  DepthRaster gt;  // metric, dense
  Image guide;     // intensity in [0, 1]
};

/// Deterministic in the spec. Depths are clamped to [min_depth, max_depth].
Scene generate_scene(const SceneSpec& spec);

/// Pinhole intrinsics used for synthetic frames: fx = fy = width, principal
/// point at the image centre.
CameraIntrinsics default_intrinsics(int width, int height);

}  // namespace spade::synth

#endif  // SPADE_SYNTH_SCENE_HPP_
