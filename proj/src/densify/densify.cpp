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

#include "spade/densify/densify.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "spade/core/error.hpp"

namespace spade::densify {

namespace {
constexpr double kMinNormalizer = 1e-300;
}  // namespace

void JbuParams::validate() const {
  if (window_radius < 1) throw ConfigError("JBU window radius must be >= 1");
  if (!(sigma_spatial > 0.0) || !(sigma_range > 0.0)) {
    throw ConfigError("JBU sigmas must be positive");
  }
}

ScaleMap sparse_scale_map(const SparsePointSet& points,
                          const DepthRaster& aligned) {
  points.check_bounds(aligned.width(), aligned.height());
  ScaleMap eps = ScaleMap::zeros(aligned.width(), aligned.height());
  for (const auto& p : points) {
    const int c = p.col();
    const int r = p.row();
    const double zt = aligned.at(c, r);
    if (!aligned.valid(c, r) || !(zt > 0.0)) {
      throw DomainError("aligned depth is not positive at point pixel (" +
                        std::to_string(c) + ", " + std::to_string(r) + ")");
    }
    const std::size_t i = eps.index(c, r);
    eps.values[i] = (1.0 / p.depth_m) / zt;
    eps.known[i] = 1;
  }
  return eps;
}

ScaleMap jbu_filter(const ScaleMap& eps, const DepthRaster& guide,
                    const JbuParams& params) {
  params.validate();
  eps.validate();
  if (eps.width != guide.width() || eps.height != guide.height()) {
    throw ShapeError("scale map and guide differ in size");
  }
  const int w = eps.width;
  const int h = eps.height;
  const int r = params.window_radius;
  const double inv_2ss = 1.0 / (2.0 * params.sigma_spatial * params.sigma_spatial);
  const double inv_2sr = 1.0 / (2.0 * params.sigma_range * params.sigma_range);

  // Spatial weights depend only on the offset.
  const int side = 2 * r + 1;
  std::vector<double> spatial(static_cast<std::size_t>(side) * side);
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      spatial[(dy + r) * side + (dx + r)] = std::exp(-(dx * dx + dy * dy) * inv_2ss);
    }
  }

  ScaleMap out = ScaleMap::zeros(w, h);
  out.known = eps.known;
  const auto& gv = guide.values();
  const auto& gm = guide.mask();
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t p = out.index(u, v);
      if (!gm[p]) continue;
      const double gp = gv[p];
      double num = 0.0;
      double den = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        const int qv = v + dy;
        if (qv < 0 || qv >= h) continue;
        for (int dx = -r; dx <= r; ++dx) {
          const int qu = u + dx;
          if (qu < 0 || qu >= w) continue;
          const std::size_t q = out.index(qu, qv);
          if (!eps.known[q] || !gm[q]) continue;
          const double d = gp - gv[q];
          const double wgt = spatial[(dy + r) * side + (dx + r)] * std::exp(-d * d * inv_2sr);
          num += eps.values[q] * wgt;
          den += wgt;
        }
      }
      if (den < kMinNormalizer) continue;
      out.values[p] = num / den;
      out.filled[p] = 1;
    }
  }
  return out;
}

ScaleMap fill_default(ScaleMap eps) {
  for (double& x : eps.values) {
    if (x == 0.0) x = 1.0;
  }
  return eps;
}

ScaleMap jbu_densify(const ScaleMap& eps, const DepthRaster& guide,
                     const JbuParams& params) {
  return fill_default(jbu_filter(eps, guide, params));
}

}  // namespace spade::densify
