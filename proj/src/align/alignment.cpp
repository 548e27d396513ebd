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

#include "spade/align/alignment.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace spade::align {

namespace {

constexpr double kMinVariance = 1e-12;

double rms(std::span<const double> z, std::span<const double> v, double s,
           double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = s * z[i] + t - v[i];
    acc += r * r;
  }
  return z.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(z.size()));
}

void check_lengths(std::span<const double> z, std::span<const double> v) {
  if (z.size() != v.size()) {
    throw ShapeError("z has " + std::to_string(z.size()) + " samples, v has " +
                     std::to_string(v.size()));
  }
}

struct Samples {
  std::vector<double> z;
  std::vector<double> v;
};

Samples sample_points(const DepthRaster& z, const SparsePointSet& points) {
  points.check_bounds(z.width(), z.height());
  Samples s;
  for (const auto& p : points) {
    if (!z.valid(p.col(), p.row())) continue;
    s.z.push_back(z.at(p.col(), p.row()));
    s.v.push_back(1.0 / p.depth_m);
  }
  return s;
}

}  // namespace

std::string_view to_string(FitMode mode) {
  switch (mode) {
    case FitMode::kScaleShift:
      return "scale_shift";
    case FitMode::kScaleOnly:
      return "scale_only";
    case FitMode::kLaserBaseline:
      return "laser_baseline";
  }
  return "unknown";
}

ScaleShift fit_scale_shift(std::span<const double> z, std::span<const double> v) {
  check_lengths(z, v);
  const std::size_t n = z.size();
  if (n < 2) {
    throw AlignmentError(AlignmentError::Kind::kInsufficientPoints,
                         "scale-shift fit needs at least 2 points, got " +
                             std::to_string(n));
  }
  double z_mean = 0.0;
  double v_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z_mean += z[i];
    v_mean += v[i];
  }
  z_mean /= static_cast<double>(n);
  v_mean /= static_cast<double>(n);
  double szz = 0.0;
  double szv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dz = z[i] - z_mean;
    szz += dz * dz;
    szv += dz * (v[i] - v_mean);
  }
  if (szz / static_cast<double>(n) < kMinVariance) {
    throw AlignmentError(AlignmentError::Kind::kDegenerateDesign,
                         "relative depth samples have (near) zero variance");
  }
  const double s = szv / szz;
  const double t = v_mean - s * z_mean;
  return {s, t, rms(z, v, s, t)};
}

double fit_scale_only(std::span<const double> z, std::span<const double> v) {
  check_lengths(z, v);
  if (z.empty()) {
    throw AlignmentError(AlignmentError::Kind::kInsufficientPoints,
                         "scale-only fit needs at least 1 point");
  }
  double szz = 0.0;
  double szv = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    szz += z[i] * z[i];
    szv += z[i] * v[i];
  }
  if (szz == 0.0) {
    throw AlignmentError(AlignmentError::Kind::kDegenerateDesign,
                         "all relative depth samples are zero");
  }
  const double s = szv / szz;
  if (!(s > 0.0)) {
    throw AlignmentError(AlignmentError::Kind::kInconsistentMeasurements,
                         "scale-only fit gave non-positive scale " +
                             std::to_string(s));
  }
  return s;
}

DepthRaster apply_affine(const DepthRaster& z, double scale, double shift) {
  std::vector<double> out(z.size(), 0.0);
  std::vector<std::uint8_t> valid(z.size(), 0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!z.mask()[i]) continue;
    const double a = scale * z.values()[i] + shift;
    if (a > 0.0 && std::isfinite(a)) {
      out[i] = a;
      valid[i] = 1;
    }
  }
  return DepthRaster(z.width(), z.height(), DepthSpace::kInverse,
                     std::move(out), std::move(valid));
}

AlignResult align_global(const DepthRaster& z, const SparsePointSet& points) {
  const Samples s = sample_points(z, points);
  if (s.z.empty()) {
    throw AlignmentError(AlignmentError::Kind::kInsufficientPoints,
                         "no sparse point lies on a valid relative-depth pixel");
  }
  AffineFit fit;
  fit.point_count = s.z.size();
  bool joint_ok = false;
  try {
    const ScaleShift joint = fit_scale_shift(s.z, s.v);
    if (joint.scale > 0.0) {
      fit.scale = joint.scale;
      fit.shift = joint.shift;
      fit.residual_rms = joint.residual_rms;
      fit.mode = FitMode::kScaleShift;
      joint_ok = true;
    }
  } catch (const AlignmentError&) {
    // Degenerate or too few points: handled by the scale-only path below.
  }
  if (!joint_ok) {
    try {
      fit.scale = fit_scale_only(s.z, s.v);
    } catch (const AlignmentError& e) {
      throw AlignmentError(AlignmentError::Kind::kAlignmentFailure,
                           std::string("scale-shift and scale-only fits both "
                                       "failed: ") +
                               e.what());
    }
    fit.shift = 0.0;
    fit.mode = FitMode::kScaleOnly;
    fit.residual_rms = rms(s.z, s.v, fit.scale, 0.0);
  }
  return {apply_affine(z, fit.scale, fit.shift), fit};
}

double laser_scale(const LaserObservation& first, const LaserObservation& second,
                   const CameraIntrinsics& intrinsics, double baseline_m) {
  if (!(first.z_rel > 0.0) || !(second.z_rel > 0.0)) {
    throw DomainError("laser relative depths must be positive");
  }
  if (!(baseline_m > 0.0)) throw DomainError("laser baseline must be positive");
  if (!(intrinsics.fx > 0.0)) throw DomainError("fx must be positive");
  const double x1 = (first.u - intrinsics.cx) / (intrinsics.fx * first.z_rel);
  const double x2 = (second.u - intrinsics.cx) / (intrinsics.fx * second.z_rel);
  const double s = (x2 - x1) / baseline_m;
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw AlignmentError(AlignmentError::Kind::kInconsistentLaserGeometry,
                         "laser spots give non-positive scale " +
                             std::to_string(s));
  }
  return s;
}

AlignResult align_laser(const DepthRaster& z, const SparsePointSet& points,
                        const CameraIntrinsics& intrinsics, double baseline_m) {
  if (points.size() != 2) {
    throw AlignmentError(AlignmentError::Kind::kInsufficientPoints,
                         "laser alignment needs exactly 2 points, got " +
                             std::to_string(points.size()));
  }
  points.check_bounds(z.width(), z.height());
  // The left spot (smaller u) is the first laser.
  const bool swap = points[1].u < points[0].u;
  LaserObservation obs[2];
  std::vector<double> zs, vs;
  for (int i = 0; i < 2; ++i) {
    const auto& p = points[swap ? 1 - i : i];
    if (!z.valid(p.col(), p.row())) {
      throw AlignmentError(AlignmentError::Kind::kInsufficientPoints,
                           "laser spot on an invalid relative-depth pixel");
    }
    obs[i] = {p.u, z.at(p.col(), p.row())};
    zs.push_back(obs[i].z_rel);
    vs.push_back(1.0 / p.depth_m);
  }
  AffineFit fit;
  fit.scale = laser_scale(obs[0], obs[1], intrinsics, baseline_m);
  fit.shift = 0.0;
  fit.mode = FitMode::kLaserBaseline;
  fit.residual_rms = rms(zs, vs, fit.scale, 0.0);
  fit.point_count = 2;
  return {apply_affine(z, fit.scale, 0.0), fit};
}

}  // namespace spade::align
