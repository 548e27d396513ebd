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

#ifndef SPADE_PIPELINE_FRAME_HPP_
#define SPADE_PIPELINE_FRAME_HPP_

#include <optional>
#include <vector>

#include "spade/align/alignment.hpp"
#include "spade/densify/densify.hpp"
#include "spade/loss/metrics.hpp"
#include "spade/pipeline/model.hpp"

namespace spade::pipeline {

/// Laser geometry for frames whose two points come from a laser scaler.
struct LaserSetup {
  CameraIntrinsics intrinsics;
  double baseline_m = 0.1;
};

/// Stage 1 and the network-independent part of stage 2.
struct Prepared {
  align::AlignResult ga;
  ScaleMap eps;  // densified and filled
};

/// Global alignment (laser path when `laser` is given), sparse scale map,
/// joint bilateral densification and neutral fill.
Prepared prepare(const DepthRaster& relative, const SparsePointSet& points,
                 const densify::JbuParams& jbu, const std::optional<LaserSetup>& laser = std::nullopt);

/// Network inputs for a batch of prepared frames, each [N, 1, H, W].
/// Invalid aligned pixels enter as 0.
struct BatchInputs {
  nn::Tensor aligned, eps, guide;
};
BatchInputs make_inputs(const std::vector<const Prepared*>& frames,
                        const std::vector<const Image*>& guides);

struct FrameResult {
  align::AffineFit fit;
  DepthRaster ga_depth;       // metric, stage 1 only
  DepthRaster refined_depth;  // metric
  DepthRaster aligned;        // inverse, stage 1
  ScaleMap eps;               // network input
  std::vector<double> correction;  // network output
  std::optional<loss::MetricReport> refined_metrics;
  std::optional<loss::MetricReport> ga_metrics;
};

/// Full two-stage inference on one frame without recording a graph. The
/// caller puts the model in eval mode first; eval-mode forwards only read
/// the model, so frames may run concurrently. Metrics are filled when `gt`
/// is given.
FrameResult run_frame(SpadeModel& model, const DepthRaster& relative, const Image& guide,
                      const SparsePointSet& points, const densify::JbuParams& jbu,
                      const DepthRaster* gt = nullptr, double range_cap = 10.0,
                      const std::optional<LaserSetup>& laser = std::nullopt);

/// Refined inverse depth -> metric raster; pixels invalid in `aligned`
/// stay invalid.
DepthRaster apply_correction(const DepthRaster& aligned, const std::vector<double>& correction);

}  // namespace spade::pipeline

#endif  // SPADE_PIPELINE_FRAME_HPP_
