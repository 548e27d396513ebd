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

#include "spade/pipeline/frame.hpp"

#include <cmath>

#include "spade/core/error.hpp"

namespace spade::pipeline {

Prepared prepare(const DepthRaster& relative, const SparsePointSet& points,
                 const densify::JbuParams& jbu, const std::optional<LaserSetup>& laser) {
  Prepared p;
  p.ga = laser ? align::align_laser(relative, points, laser->intrinsics, laser->baseline_m)
               : align::align_global(relative, points);
  // Points on pixels that alignment masked out carry no usable factor.
  std::vector<SparsePoint> usable;
  for (const auto& pt : points) {
    if (p.ga.aligned.contains(pt.col(), pt.row()) && p.ga.aligned.valid(pt.col(), pt.row())) {
      usable.push_back(pt);
    }
  }
  const ScaleMap sparse = densify::sparse_scale_map(SparsePointSet(std::move(usable)), p.ga.aligned);
  p.eps = densify::jbu_densify(sparse, p.ga.aligned, jbu);
  return p;
}

BatchInputs make_inputs(const std::vector<const Prepared*>& frames,
                        const std::vector<const Image*>& guides) {
  if (frames.empty() || frames.size() != guides.size()) {
    throw ShapeError("make_inputs: need one guide per prepared frame");
  }
  const int w = frames[0]->ga.aligned.width(), h = frames[0]->ga.aligned.height();
  const auto n = static_cast<std::int64_t>(frames.size());
  const std::size_t px = static_cast<std::size_t>(w) * h;
  std::vector<double> a(px * frames.size()), e(px * frames.size()), g(px * frames.size());
  for (std::size_t b = 0; b < frames.size(); ++b) {
    const auto& al = frames[b]->ga.aligned;
    if (al.width() != w || al.height() != h || guides[b]->width != w || guides[b]->height != h) {
      throw ShapeError("make_inputs: frames differ in size");
    }
    for (std::size_t i = 0; i < px; ++i) {
      a[b * px + i] = al.mask()[i] ? al.values()[i] : 0.0;
      e[b * px + i] = frames[b]->eps.values[i];
      g[b * px + i] = guides[b]->values[i];
    }
  }
  const nn::Shape shape{n, 1, h, w};
  return {nn::Tensor::from(shape, std::move(a)), nn::Tensor::from(shape, std::move(e)),
          nn::Tensor::from(shape, std::move(g))};
}

DepthRaster apply_correction(const DepthRaster& aligned, const std::vector<double>& correction) {
  if (correction.size() != aligned.size()) throw ShapeError("correction size mismatch");
  std::vector<double> v(aligned.size(), 0.0);
  std::vector<std::uint8_t> m(aligned.mask());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!m[i]) continue;
    const double z = aligned.values()[i] * correction[i];
    if (z > 0 && std::isfinite(z)) {
      v[i] = 1.0 / z;
    } else {
      m[i] = 0;
    }
  }
  return DepthRaster(aligned.width(), aligned.height(), DepthSpace::kMetric, std::move(v), std::move(m));
}

FrameResult run_frame(SpadeModel& model, const DepthRaster& relative, const Image& guide,
                      const SparsePointSet& points, const densify::JbuParams& jbu,
                      const DepthRaster* gt, double range_cap,
                      const std::optional<LaserSetup>& laser) {
  const auto& cfg = model.config();
  if (relative.width() != cfg.input_width || relative.height() != cfg.input_height) {
    throw ShapeError("run_frame: frame is " + std::to_string(relative.width()) + "x" +
                     std::to_string(relative.height()) + ", network expects " +
                     std::to_string(cfg.input_width) + "x" + std::to_string(cfg.input_height));
  }
  Prepared p = prepare(relative, points, jbu, laser);
  FrameResult r;
  r.fit = p.ga.fit;
  r.aligned = p.ga.aligned;
  r.ga_depth = apply_correction(p.ga.aligned, std::vector<double>(p.ga.aligned.size(), 1.0));
  {
    nn::NoGradGuard no_grad;
    const BatchInputs in = make_inputs({&p}, {&guide});
    r.correction = model.forward(in.aligned, in.eps, in.guide).data();
  }
  r.refined_depth = apply_correction(p.ga.aligned, r.correction);
  r.eps = std::move(p.eps);
  if (gt) {
    r.refined_metrics = loss::frame_metrics(r.refined_depth, *gt, range_cap);
    r.ga_metrics = loss::frame_metrics(r.ga_depth, *gt, range_cap);
  }
  return r;
}

}  // namespace spade::pipeline
