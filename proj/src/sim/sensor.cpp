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

#include "spade/sim/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "spade/core/error.hpp"
#include "spade/core/rng.hpp"

namespace spade::sim {
namespace {

constexpr int kSnapRadius = 3;

// Nearest valid pixel within kSnapRadius (ties broken by scan order).
std::optional<std::pair<int, int>> snap(const DepthRaster& gt, int u, int v) {
  if (gt.contains(u, v) && gt.valid(u, v)) return std::pair{u, v};
  std::optional<std::pair<int, int>> best;
  int best_d = INT32_MAX;
  for (int dv = -kSnapRadius; dv <= kSnapRadius; ++dv) {
    for (int du = -kSnapRadius; du <= kSnapRadius; ++du) {
      const int d = du * du + dv * dv;
      if (d > kSnapRadius * kSnapRadius || d >= best_d) continue;
      if (gt.contains(u + du, v + dv) && gt.valid(u + du, v + dv)) {
        best = std::pair{u + du, v + dv};
        best_d = d;
      }
    }
  }
  return best;
}

class Collector {
 public:
  explicit Collector(const DepthRaster& gt) : gt_(gt) {}

  void add_pixel(int u, int v) {
    const auto p = snap(gt_, u, v);
    if (!p) {
      ++dropped_;
      return;
    }
    if (!seen_.insert(*p).second) return;
    points_.push_back({static_cast<double>(p->first), static_cast<double>(p->second),
                       gt_.at(p->first, p->second)});
  }

  void add_subpixel(double u, double v) {
    const int cu = static_cast<int>(std::lround(u)), cv = static_cast<int>(std::lround(v));
    if (!gt_.contains(cu, cv) || !gt_.valid(cu, cv)) {
      ++dropped_;
      return;
    }
    if (!seen_.insert({cu, cv}).second) return;
    points_.push_back({u, v, gt_.at(cu, cv)});
  }

  void drop() { ++dropped_; }

  SampleResult finish() { return {SparsePointSet(std::move(points_)), dropped_}; }

 private:
  const DepthRaster& gt_;
  std::vector<SparsePoint> points_;
  std::set<std::pair<int, int>> seen_;
  std::size_t dropped_ = 0;
};

int centred(int i, int n, int extent) {
  return static_cast<int>(std::floor((i + 0.5) * extent / static_cast<double>(n)));
}

std::vector<double> gradient_magnitude(const std::vector<double>& img, int w, int h) {
  std::vector<double> out(img.size(), 0.0);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const int ul = std::max(u - 1, 0), ur = std::min(u + 1, w - 1);
      const int vu = std::max(v - 1, 0), vd = std::min(v + 1, h - 1);
      const double gx = img[static_cast<std::size_t>(v) * w + ur] - img[static_cast<std::size_t>(v) * w + ul];
      const double gy = img[static_cast<std::size_t>(vd) * w + u] - img[static_cast<std::size_t>(vu) * w + u];
      out[static_cast<std::size_t>(v) * w + u] = std::hypot(gx, gy);
    }
  }
  return out;
}

void sample_features(const DepthRaster& gt, const PatternSpec& spec, const Image* guide,
                     Collector& out) {
  const int w = gt.width(), h = gt.height();
  std::vector<double> base;
  if (guide) {
    if (guide->width != w || guide->height != h) {
      throw ShapeError("feature sampling: guide and ground truth sizes differ");
    }
    base = guide->values;
  } else {
    base = gt.values();
  }
  std::vector<double> weight = gradient_magnitude(base, w, h);
  double mean = 0;
  for (double g : weight) mean += g;
  mean /= static_cast<double>(weight.size());
  // A floor keeps flat regions reachable, as trackers still find a few
  // corners there.
  const double floor = 0.05 * mean + 1e-12;
  // Weighted sampling without replacement: keep the largest u^(1/w) keys.
  Rng rng(spec.seed);
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(weight.size());
  for (std::size_t i = 0; i < weight.size(); ++i) {
    const double u = rng.uniform();
    if (!gt.mask()[i]) continue;
    keys.emplace_back(std::log(std::max(u, 1e-300)) / (weight[i] + floor), i);
  }
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(spec.count), keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n), keys.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = keys[k].second;
    out.add_pixel(static_cast<int>(i % static_cast<std::size_t>(w)),
                  static_cast<int>(i / static_cast<std::size_t>(w)));
  }
}

}  // namespace

std::string to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::kFeatureLike: return "feature_like";
    case PatternKind::kUniformGrid: return "uniform_grid";
    case PatternKind::kSonarLine: return "sonar_line";
    case PatternKind::kDvl4: return "dvl4";
    case PatternKind::kLaser2: return "laser2";
  }
  return "unknown";
}

PatternKind parse_pattern_kind(const std::string& name) {
  for (auto k : {PatternKind::kFeatureLike, PatternKind::kUniformGrid, PatternKind::kSonarLine,
                 PatternKind::kDvl4, PatternKind::kLaser2}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown sensor pattern '" + name + "'");
}

void PatternSpec::validate() const {
  if (count <= 0) throw ConfigError("pattern: count must be > 0");
  if (grid_rows <= 0 || grid_cols <= 0) throw ConfigError("pattern: grid rows/cols must be > 0");
  if (sonar_jitter < 0) throw ConfigError("pattern: sonar jitter must be >= 0");
  if (!(dvl_fraction > 0 && dvl_fraction <= 1)) throw ConfigError("pattern: dvl fraction must be in (0, 1]");
  if (!(laser_baseline > 0)) throw ConfigError("pattern: laser baseline must be > 0");
  if (!(laser_max_range > 0)) throw ConfigError("pattern: laser max range must be > 0");
}

std::optional<double> laser_column(const DepthRaster& gt, const CameraIntrinsics& k, double x0) {
  const int row = static_cast<int>(std::lround(k.cy));
  // On the spot, 1/depth(u) == (u - cx) / (fx x0); look for a sign change of
  // the difference between neighbouring columns.
  auto f = [&](int u) { return 1.0 / gt.at(u, row) - (u - k.cx) / (k.fx * x0); };
  const int lo = x0 > 0 ? static_cast<int>(std::ceil(k.cx)) : 0;
  const int hi = x0 > 0 ? gt.width() - 1 : static_cast<int>(std::floor(k.cx));
  for (int u = lo; u < hi; ++u) {
    if (!gt.valid(u, row) || !gt.valid(u + 1, row)) continue;
    const double a = f(u), b = f(u + 1);
    if (a == 0.0) return static_cast<double>(u);
    if ((a < 0) != (b < 0)) return u + a / (a - b);
  }
  if (gt.valid(hi, row) && f(hi) == 0.0) return static_cast<double>(hi);
  return std::nullopt;
}

SampleResult sample_pattern(const DepthRaster& gt, const PatternSpec& spec, const Image* guide,
                            const std::optional<CameraIntrinsics>& intrinsics) {
  spec.validate();
  if (gt.space() != DepthSpace::kMetric) throw DomainError("sample_pattern: ground truth must be metric");
  const int w = gt.width(), h = gt.height();
  Collector out(gt);
  switch (spec.kind) {
    case PatternKind::kFeatureLike:
      sample_features(gt, spec, guide, out);
      break;
    case PatternKind::kUniformGrid:
      for (int r = 0; r < spec.grid_rows; ++r) {
        for (int c = 0; c < spec.grid_cols; ++c) {
          out.add_pixel(centred(c, spec.grid_cols, w), centred(r, spec.grid_rows, h));
        }
      }
      break;
    case PatternKind::kSonarLine: {
      Rng rng(spec.seed);
      const int row = spec.sonar_row < 0 ? h / 2 : spec.sonar_row;
      for (int c = 0; c < spec.count; ++c) {
        const int jitter = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * spec.sonar_jitter + 1))) -
                           spec.sonar_jitter;
        out.add_pixel(centred(c, spec.count, w), std::clamp(row + jitter, 0, h - 1));
      }
      break;
    }
    case PatternKind::kDvl4: {
      const double half = 0.5 * spec.dvl_fraction * std::min(w, h);
      const double cu = w / 2, cv = h / 2;
      for (double sv : {-1.0, 1.0}) {
        for (double su : {-1.0, 1.0}) {
          out.add_pixel(static_cast<int>(std::lround(cu + su * half)),
                        static_cast<int>(std::lround(cv + sv * half)));
        }
      }
      break;
    }
    case PatternKind::kLaser2: {
      if (!intrinsics) throw ConfigError("laser2 pattern requires camera intrinsics");
      intrinsics->validate(w, h);
      for (double x0 : {-0.5 * spec.laser_baseline, 0.5 * spec.laser_baseline}) {
        const auto u = laser_column(gt, *intrinsics, x0);
        if (!u) {
          out.drop();
          continue;
        }
        const double depth = intrinsics->fx * x0 / (*u - intrinsics->cx);
        if (depth > spec.laser_max_range) continue;
        out.add_subpixel(*u, std::round(intrinsics->cy));
      }
      break;
    }
  }
  return out.finish();
}

SparsePointSet subsample(const SparsePointSet& pts, std::size_t keep, std::uint64_t seed) {
  if (keep > pts.size()) {
    throw ConfigError("subsample: cannot keep " + std::to_string(keep) + " of " +
                      std::to_string(pts.size()) + " points");
  }
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<SparsePoint> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(pts[order[i]]);
  return SparsePointSet(std::move(out));
}

SparsePointSet subsample_fraction(const SparsePointSet& pts, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0 && fraction <= 1)) throw ConfigError("subsample: fraction must be in [0, 1]");
  return subsample(pts, static_cast<std::size_t>(std::lround(fraction * pts.size())), seed);
}

}  // namespace spade::sim
