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

#ifndef SPADE_ALIGN_ALIGNMENT_HPP_
#define SPADE_ALIGN_ALIGNMENT_HPP_

#include <cstddef>
#include <span>
#include <string_view>

#include "spade/core/error.hpp"
#include "spade/core/types.hpp"

namespace spade::align {

enum class FitMode { kScaleShift, kScaleOnly, kLaserBaseline };

std::string_view to_string(FitMode mode);

/// Raised when a fit cannot be produced.
class AlignmentError : public Error {
 public:
  enum class Kind {
    kInsufficientPoints,
    kDegenerateDesign,
    kInconsistentMeasurements,
    kInconsistentLaserGeometry,
    kAlignmentFailure,
  };
  AlignmentError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct AffineFit {
  double scale = 1.0;
  double shift = 0.0;  // exactly 0 unless mode is kScaleShift
  FitMode mode = FitMode::kScaleShift;
  double residual_rms = 0.0;
  std::size_t point_count = 0;
};

struct ScaleShift {
  double scale;
  double shift;
  double residual_rms;
};

/// Least-squares (s, t) minimising sum((s z_i + t - v_i)^2), solved from the
/// 2x2 normal equations in centred form. Requires N >= 2 and var(z) >= 1e-12.
ScaleShift fit_scale_shift(std::span<const double> z, std::span<const double> v);

/// s = sum(z v) / sum(z^2). Throws when sum(z^2) == 0 or s <= 0.
double fit_scale_only(std::span<const double> z, std::span<const double> v);

struct AlignResult {
  DepthRaster aligned;  // inverse-depth space
  AffineFit fit;
};

/// Samples z at the point pixels (nearest pixel), fits scale and shift
/// against v = 1/depth, and falls back to scale-only when the joint fit is
/// degenerate or yields s <= 0. Pixels whose aligned value is not positive
/// are masked out. Points on invalid pixels of z are not used.
AlignResult align_global(const DepthRaster& z, const SparsePointSet& points);

/// Applies a fixed affine map to every valid pixel of z.
DepthRaster apply_affine(const DepthRaster& z, double scale, double shift);

struct LaserObservation {
  double u;      // column of the laser spot, pixels
  double z_rel;  // relative inverse depth sampled at the spot
};

/// Global scale from two parallel laser spots a baseline B apart:
/// s = ((u2 - cx) / (fx z2) - (u1 - cx) / (fx z1)) / B.
double laser_scale(const LaserObservation& first, const LaserObservation& second,
                   const CameraIntrinsics& intrinsics, double baseline_m);

/// Scale-only alignment whose scale comes from the two laser points of
/// `points`; the spot with the smaller column is taken as the first laser.
/// Residual is measured against the points' depths.
AlignResult align_laser(const DepthRaster& z, const SparsePointSet& points,
                        const CameraIntrinsics& intrinsics, double baseline_m);

}  // namespace spade::align

#endif  // SPADE_ALIGN_ALIGNMENT_HPP_
