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

#ifndef SPADE_DENSIFY_DENSIFY_HPP_
#define SPADE_DENSIFY_DENSIFY_HPP_

#include "spade/core/types.hpp"

namespace spade::densify {

/// Window half-width and Gaussian widths of the joint bilateral filter.
/// sigma_range is in inverse-depth units.
struct JbuParams {
  int window_radius = 7;
  double sigma_spatial = 3.0;
  double sigma_range = 0.1;

  void validate() const;
};

/// epsilon = v / aligned at every point pixel; known mask set exactly there.
ScaleMap sparse_scale_map(const SparsePointSet& points,
                          const DepthRaster& aligned);

/// Joint bilateral propagation of the known factors, guided by the aligned
/// inverse depth:
///   out_p = sum_q eps_q f(|p - q|) g(|guide_p - guide_q|) / k_p
/// over known q in the (2r+1)^2 window. Pixels with no contributing neighbour
/// (or k_p < 1e-300) stay 0 and are not marked filled. Known flags are kept.
ScaleMap jbu_filter(const ScaleMap& eps, const DepthRaster& guide,
                    const JbuParams& params);

/// Replaces every zero value by the neutral factor 1.0.
ScaleMap fill_default(ScaleMap eps);

/// jbu_filter followed by fill_default.
ScaleMap jbu_densify(const ScaleMap& eps, const DepthRaster& guide,
                     const JbuParams& params);

}  // namespace spade::densify

#endif  // SPADE_DENSIFY_DENSIFY_HPP_
