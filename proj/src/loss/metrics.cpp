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

#include "spade/loss/metrics.hpp"

#include <cmath>

#include "spade/core/error.hpp"

namespace spade::loss {

std::optional<MetricReport> frame_metrics(const DepthRaster& pred, const DepthRaster& gt,
                                          double cap) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw ShapeError("metrics: prediction and ground truth sizes differ");
  }
  if (pred.space() != DepthSpace::kMetric || gt.space() != DepthSpace::kMetric) {
    throw DomainError("metrics: both rasters must hold metric depth");
  }
  if (!(cap > 0)) throw ConfigError("metrics: range cap must be > 0");
  const auto& p = pred.values();
  const auto& g = gt.values();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (gt.mask()[i] && pred.mask()[i] && g[i] > 0 && g[i] <= cap) idx.push_back(i);
  }
  if (idx.empty()) return std::nullopt;
  const double n = static_cast<double>(idx.size());
  double abs_sum = 0, sq_sum = 0, rel_sum = 0, inv_sum = 0, alpha = 0;
  for (std::size_t i : idx) {
    const double e = p[i] - g[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    rel_sum += std::abs(e) / g[i];
    inv_sum += std::abs(1.0 / p[i] - 1.0 / g[i]);
    alpha += std::log(g[i]) - std::log(p[i]);
  }
  alpha /= n;
  double si = 0;
  for (std::size_t i : idx) {
    const double r = std::log(p[i]) - std::log(g[i]) + alpha;
    si += r * r;
  }
  MetricReport m;
  m.mae = abs_sum / n;
  m.rmse = std::sqrt(sq_sum / n);
  m.absrel = rel_sum / n;
  m.silog = std::sqrt(si / n);
  m.imae = inv_sum / n;
  m.range_cap = cap;
  m.frame_count = 1;
  m.pixel_count = idx.size();
  return m;
}

MetricReport aggregate(const std::vector<std::optional<MetricReport>>& frames, double cap) {
  MetricReport out;
  out.range_cap = cap;
  for (const auto& f : frames) {
    if (!f) {
      ++out.skipped_frames;
      continue;
    }
    out.mae += f->mae;
    out.rmse += f->rmse;
    out.absrel += f->absrel;
    out.silog += f->silog;
    out.imae += f->imae;
    out.pixel_count += f->pixel_count;
    ++out.frame_count;
  }
  if (out.frame_count > 0) {
    const double n = static_cast<double>(out.frame_count);
    out.mae /= n;
    out.rmse /= n;
    out.absrel /= n;
    out.silog /= n;
    out.imae /= n;
  }
  return out;
}

}  // namespace spade::loss
