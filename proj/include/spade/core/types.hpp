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

#ifndef SPADE_CORE_TYPES_HPP_
#define SPADE_CORE_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace spade {

/// What a raster's values measure.
enum class DepthSpace : std::uint8_t {
  kMetric = 0,    // metres
  kInverse = 1,   // 1/metres
  kAffine = 2,    // affine-invariant inverse depth, unitless
};

std::string_view to_string(DepthSpace space);

/// Dense per-pixel depth field with a validity mask. Pixel (u, v) is column
/// u, row v, origin top-left; storage is row-major. Immutable once built.
class DepthRaster {
 public:
  DepthRaster() = default;
  /// Validates the invariants: matching sizes, finite values at valid
  /// pixels, and strictly positive values for metric and inverse spaces.
  DepthRaster(int width, int height, DepthSpace space,
              std::vector<double> values, std::vector<std::uint8_t> valid);

  /// Fully valid raster.
  static DepthRaster dense(int width, int height, DepthSpace space,
                           std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  DepthSpace space() const { return space_; }

  double at(int u, int v) const { return values_[index(u, v)]; }
  bool valid(int u, int v) const { return valid_[index(u, v)] != 0; }
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * width_ + u;
  }
  bool contains(int u, int v) const {
    return u >= 0 && v >= 0 && u < width_ && v < height_;
  }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint8_t>& mask() const { return valid_; }
  std::size_t valid_count() const;

 private:
  int width_ = 0;
  int height_ = 0;
  DepthSpace space_ = DepthSpace::kMetric;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

/// One sparse metric measurement. Coordinates are continuous pixel
/// positions; lookups into rasters use the nearest pixel.
struct SparsePoint {
  double u = 0.0;
  double v_row = 0.0;
  double depth_m = 0.0;

  int col() const;
  int row() const;
};

/// Sparse metric depth measurements. Depths are positive and no two points
/// share a (rounded) pixel.
class SparsePointSet {
 public:
  SparsePointSet() = default;
  explicit SparsePointSet(std::vector<SparsePoint> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const SparsePoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<SparsePoint>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  /// Throws DomainError when any point falls outside a width x height raster.
  void check_bounds(int width, int height) const;

 private:
  std::vector<SparsePoint> points_;
};

/// Per-pixel multiplicative correction factors. `known` marks measured
/// pixels; `filled` marks pixels that received a propagated value.
struct ScaleMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> known;
  std::vector<std::uint8_t> filled;

  static ScaleMap zeros(int width, int height);

  std::size_t size() const { return values.size(); }
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * width + u;
  }
  double at(int u, int v) const { return values[index(u, v)]; }
  std::size_t known_count() const;
  std::size_t filled_count() const;
  /// Throws DomainError if a known value is non-finite or non-positive.
  void validate() const;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  /// Positive focal lengths and a principal point inside the image.
  void validate(int width, int height) const;
};

/// Single-channel guide image (intensity in [0, 1]).
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int u, int v) const {
    return values[static_cast<std::size_t>(v) * width + u];
  }
};

/// Pixelwise reciprocal of a metric raster. Invalid pixels stay invalid.
DepthRaster to_inverse(const DepthRaster& metric);
/// Pixelwise reciprocal of an inverse raster.
DepthRaster from_inverse(const DepthRaster& inverse);

}  // namespace spade

#endif  // SPADE_CORE_TYPES_HPP_
