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

#ifndef SPADE_PIPELINE_REPORT_HPP_
#define SPADE_PIPELINE_REPORT_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spade/pipeline/evaluate.hpp"

namespace spade::pipeline {

/// Black -> red -> yellow -> white; luminance increases with t in [0, 1].
std::array<std::uint8_t, 3> heat_color(double t);

/// Binary PPM (P6) of |pred - gt| at pixels valid in both, scaled by
/// `max_error` (values above saturate). Other pixels are black.
std::vector<std::uint8_t> error_map_ppm(const DepthRaster& pred, const DepthRaster& gt,
                                        double max_error);

/// One row per frame.
std::string metrics_markdown(const EvalReport& report);
std::string metrics_csv(const EvalReport& report);

/// Writes error_<i>_refined.ppm / error_<i>_ga.ppm for frames that kept
/// their depths, plus metrics.md, metrics.csv and report.json.
void render_report(const EvalReport& report, const std::vector<Frame>& frames,
                   const std::filesystem::path& out_dir, double max_error = 1.0);

}  // namespace spade::pipeline

#endif  // SPADE_PIPELINE_REPORT_HPP_
