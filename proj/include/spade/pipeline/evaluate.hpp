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

#ifndef SPADE_PIPELINE_EVALUATE_HPP_
#define SPADE_PIPELINE_EVALUATE_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spade/pipeline/config.hpp"
#include "spade/pipeline/dataset.hpp"
#include "spade/pipeline/frame.hpp"

namespace spade::pipeline {

/// Sparse input chosen for one frame, plus laser geometry for laser frames.
struct FramePoints {
  SparsePointSet points;
  std::optional<LaserSetup> laser;
};
using PointSource = std::function<FramePoints(const Frame&, int index)>;

struct FrameRecord {
  int index = 0;
  std::string status;  // "ok", "alignment_failed", "no_points", "empty_mask"
  std::string detail;
  align::AffineFit fit;
  std::size_t point_count = 0;
  std::optional<loss::MetricReport> refined;
  std::optional<loss::MetricReport> ga;
  // Kept for report rendering.
  std::optional<DepthRaster> refined_depth;
  std::optional<DepthRaster> ga_depth;
};

struct PointStats {
  double mean_count = 0;
  double min_depth = 0, max_depth = 0, mean_depth = 0, median_depth = 0;
};

struct EvalReport {
  std::vector<FrameRecord> frames;
  loss::MetricReport refined;
  loss::MetricReport ga;
  PointStats points;
  double range_cap = 0;
};

/// Runs every frame (frame-parallel) and aggregates per-frame metrics in
/// index order. The model is switched to eval mode.
EvalReport evaluate(SpadeModel& model, const std::vector<Frame>& frames, const RunConfig& cfg,
                    const PointSource& source, double range_cap, bool keep_depths = false);

/// Evaluation with each frame's own feature-like points.
EvalReport evaluate(SpadeModel& model, const std::vector<Frame>& frames, const RunConfig& cfg,
                    bool keep_depths = false);

/// Point source for a sweep cell. Feature-like and sonar sets are nested
/// across counts (same seed, sample then trim); grids are rebuilt per count;
/// dvl4 and laser2 ignore the count.
PointSource sweep_source(const RunConfig& cfg, sim::PatternKind pattern, int count);

struct SweepCell {
  sim::PatternKind pattern;
  int count;
  double cap;
  loss::MetricReport refined;
  loss::MetricReport ga;
  double mean_points = 0;
};

struct SweepReport {
  std::vector<SweepCell> cells;
};

SweepReport sweep(SpadeModel& model, const std::vector<Frame>& frames, const RunConfig& cfg,
                  const SweepSpec& spec);

json to_json(const loss::MetricReport& m);
json to_json(const EvalReport& r);
json to_json(const SweepReport& r);
std::string sweep_csv(const SweepReport& r);

}  // namespace spade::pipeline

#endif  // SPADE_PIPELINE_EVALUATE_HPP_
