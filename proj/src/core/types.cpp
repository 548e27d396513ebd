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

#include "spade/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "spade/core/error.hpp"

namespace spade {

std::string_view to_string(DepthSpace space) {
  switch (space) {
    case DepthSpace::kMetric:
      return "metric_depth_m";
    case DepthSpace::kInverse:
      return "inverse_depth_per_m";
    case DepthSpace::kAffine:
      return "affine_invariant_inverse";
  }
  return "unknown";
}

namespace {

std::string pixel_name(std::size_t i, int width) {
  return "(u=" + std::to_string(i % width) + ", v=" + std::to_string(i / width) +
         ")";
}

}  // namespace

DepthRaster::DepthRaster(int width, int height, DepthSpace space,
                         std::vector<double> values,
                         std::vector<std::uint8_t> valid)
    : width_(width),
      height_(height),
      space_(space),
      values_(std::move(values)),
      valid_(std::move(valid)) {
  if (width < 0 || height < 0) throw ShapeError("negative raster dimensions");
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (values_.size() != n || valid_.size() != n) {
    throw ShapeError("raster " + std::to_string(width) + "x" +
                     std::to_string(height) + " has " +
                     std::to_string(values_.size()) + " values and " +
                     std::to_string(valid_.size()) + " mask entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid_[i]) continue;
    valid_[i] = 1;
    if (!std::isfinite(values_[i])) {
      throw DomainError("non-finite value at valid pixel " +
                        pixel_name(i, width));
    }
    if (space != DepthSpace::kAffine && values_[i] <= 0.0) {
      throw DomainError("non-positive " + std::string(to_string(space)) +
                        " value " + std::to_string(values_[i]) +
                        " at valid pixel " + pixel_name(i, width));
    }
  }
}

DepthRaster DepthRaster::dense(int width, int height, DepthSpace space,
                               std::vector<double> values) {
  std::vector<std::uint8_t> valid(values.size(), 1);
  return DepthRaster(width, height, space, std::move(values), std::move(valid));
}

std::size_t DepthRaster::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), 1));
}

int SparsePoint::col() const { return static_cast<int>(std::lround(u)); }
int SparsePoint::row() const { return static_cast<int>(std::lround(v_row)); }

SparsePointSet::SparsePointSet(std::vector<SparsePoint> points)
    : points_(std::move(points)) {
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.u) || !std::isfinite(p.v_row)) {
      throw DomainError("point " + std::to_string(i) +
                        " has non-finite coordinates");
    }
    if (!(p.depth_m > 0.0) || !std::isfinite(p.depth_m)) {
      throw DomainError("point " + std::to_string(i) +
                        " has non-positive depth " + std::to_string(p.depth_m));
    }
    if (!seen.emplace(p.col(), p.row()).second) {
      throw DomainError("duplicate point at pixel (" + std::to_string(p.col()) +
                        ", " + std::to_string(p.row()) + ")");
    }
  }
}

void SparsePointSet::check_bounds(int width, int height) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const int c = points_[i].col();
    const int r = points_[i].row();
    if (c < 0 || r < 0 || c >= width || r >= height) {
      throw DomainError("point " + std::to_string(i) + " at (" +
                        std::to_string(c) + ", " + std::to_string(r) +
                        ") lies outside a " + std::to_string(width) + "x" +
                        std::to_string(height) + " raster");
    }
  }
}

ScaleMap ScaleMap::zeros(int width, int height) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  ScaleMap m;
  m.width = width;
  m.height = height;
  m.values.assign(n, 0.0);
  m.known.assign(n, 0);
  m.filled.assign(n, 0);
  return m;
}

std::size_t ScaleMap::known_count() const {
  return static_cast<std::size_t>(std::count(known.begin(), known.end(), 1));
}

std::size_t ScaleMap::filled_count() const {
  return static_cast<std::size_t>(std::count(filled.begin(), filled.end(), 1));
}

void ScaleMap::validate() const {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (values.size() != n || known.size() != n || filled.size() != n) {
    throw ShapeError("scale map buffers do not match " + std::to_string(width) +
                     "x" + std::to_string(height));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (known[i] && !(std::isfinite(values[i]) && values[i] > 0.0)) {
      throw DomainError("known scale factor " + std::to_string(values[i]) +
                        " at pixel " + pixel_name(i, width) +
                        " is not finite and positive");
    }
  }
}

void CameraIntrinsics::validate(int width, int height) const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw ConfigError("focal lengths must be positive");
  }
  if (cx < 0.0 || cy < 0.0 || cx > width - 1 || cy > height - 1) {
    throw ConfigError("principal point (" + std::to_string(cx) + ", " +
                      std::to_string(cy) + ") lies outside the image");
  }
}

namespace {

DepthRaster reciprocal(const DepthRaster& r, DepthSpace from, DepthSpace to) {
  if (r.space() != from) {
    throw DomainError("expected a " + std::string(to_string(from)) +
                      " raster, got " + std::string(to_string(r.space())));
  }
  std::vector<double> out(r.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r.mask()[i]) continue;
    const double x = r.values()[i];
    if (!(x > 0.0)) {
      throw DomainError("non-positive value " + std::to_string(x) +
                        " at pixel " + pixel_name(i, r.width()));
    }
    out[i] = 1.0 / x;
  }
  return DepthRaster(r.width(), r.height(), to, std::move(out), r.mask());
}

}  // namespace

DepthRaster to_inverse(const DepthRaster& metric) {
  return reciprocal(metric, DepthSpace::kMetric, DepthSpace::kInverse);
}

DepthRaster from_inverse(const DepthRaster& inverse) {
  return reciprocal(inverse, DepthSpace::kInverse, DepthSpace::kMetric);
}

}  // namespace spade
