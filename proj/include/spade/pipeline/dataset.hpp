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

#ifndef SPADE_PIPELINE_DATASET_HPP_
#define SPADE_PIPELINE_DATASET_HPP_

#include <string>
#include <vector>

#include "spade/pipeline/config.hpp"
#include "spade/synth/oracle.hpp"
#include "spade/synth/scene.hpp"

namespace spade::pipeline {

enum class Split { kTrain, kVal, kTest };
std::string to_string(Split split);

/// One synthetic sample: ground truth, guide, oracle output and the full
/// feature-like point set.
struct Frame {
  synth::SceneSpec scene;
  synth::OracleSpec oracle;
  DepthRaster gt;
  Image guide;
  DepthRaster relative;
  SparsePointSet points;
  CameraIntrinsics intrinsics;
};

std::uint64_t frame_seed(std::uint64_t seed, Split split, int index);
Frame make_frame(const RunConfig& cfg, Split split, int index);
/// Generated with worker_count() threads; order follows the index.
std::vector<Frame> make_split(const RunConfig& cfg, Split split);

}  // namespace spade::pipeline

#endif  // SPADE_PIPELINE_DATASET_HPP_
