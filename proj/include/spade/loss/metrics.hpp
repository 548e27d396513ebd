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

#ifndef SPADE_LOSS_METRICS_HPP_
#define SPADE_LOSS_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "spade/core/types.hpp"

namespace spade::loss {

struct MetricReport {
  double mae = 0;     // m
  double rmse = 0;    // m
  double absrel = 0;
  double silog = 0;
  double imae = 0;    // 1/m
  double range_cap = 0;
  std::size_t frame_count = 0;
  std::size_t skipped_frames = 0;
  std::size_t pixel_count = 0;  // summed over frames
};

/// Per-frame metrics on metric-depth rasters. Evaluated where the ground
/// truth is valid, positive and within `cap`, and the prediction is valid.
/// Returns nullopt when that set is empty.
std::optional<MetricReport> frame_metrics(const DepthRaster& pred, const DepthRaster& gt,
                                          double cap);

/// Unweighted mean of per-frame reports; nullopt entries count as skipped.
MetricReport aggregate(const std::vector<std::optional<MetricReport>>& frames, double cap);

}  // namespace spade::loss

#endif  // SPADE_LOSS_METRICS_HPP_
