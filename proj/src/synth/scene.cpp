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

#include "spade/synth/scene.hpp"

#include <algorithm>
#include <cmath>

#include "spade/core/error.hpp"
#include "spade/core/rng.hpp"

namespace spade::synth {
namespace {

double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }

struct Canvas {
  int w, h;
  std::vector<double> depth;
  std::vector<int> region;
  Canvas(int width, int height)
      : w(width), h(height), depth(static_cast<std::size_t>(width) * height, 0.0),
        region(depth.size(), 0) {}
  std::size_t at(int u, int v) const { return static_cast<std::size_t>(v) * w + u; }
};

void draw_plane(const SceneSpec& s, Canvas& c) {
  std::fill(c.depth.begin(), c.depth.end(), s.min_depth);
}

void draw_canyon(const SceneSpec& s, Rng& rng, Canvas& c) {
  const ValueNoise meander(rng.fork(), c.h * 0.75, c.w, c.h);
  const ValueNoise rough(rng.fork(), 8.0, c.w, c.h);
  const double span = s.max_depth - s.min_depth;
  for (int v = 0; v < c.h; ++v) {
    const double centre = 0.25 * meander(0.0, v);
    const double rise = 0.65 + 0.35 * (1.0 - static_cast<double>(v) / c.h);
    for (int u = 0; u < c.w; ++u) {
      const double x = (u - 0.5 * c.w) / (0.5 * c.w) - centre;
      const double open = 1.0 - std::pow(std::min(std::abs(x), 1.0), 1.5);
      c.depth[c.at(u, v)] = s.min_depth + span * (open * rise + 0.05 * rough(u, v));
      c.region[c.at(u, v)] = x < 0 ? 0 : 1;
    }
  }
}

void draw_seafloor(const SceneSpec& s, Rng& rng, Canvas& c) {
  const double inv_near = 1.0 / s.min_depth, inv_far = 1.0 / s.max_depth;
  for (int v = 0; v < c.h; ++v) {
    const double t = std::pow(static_cast<double>(v) / (c.h - 1 > 0 ? c.h - 1 : 1), 1.2);
    for (int u = 0; u < c.w; ++u) c.depth[c.at(u, v)] = 1.0 / (inv_far + (inv_near - inv_far) * t);
  }
  const int rocks = 3 + static_cast<int>(rng.below(4));
  for (int k = 0; k < rocks; ++k) {
    const double cu = rng.uniform(0, c.w), cv = rng.uniform(0.2 * c.h, c.h);
    const double sigma = rng.uniform(0.05, 0.15) * std::min(c.w, c.h);
    const double lift = rng.uniform(0.15, 0.45);
    for (int v = 0; v < c.h; ++v) {
      for (int u = 0; u < c.w; ++u) {
        const double r2 = (u - cu) * (u - cu) + (v - cv) * (v - cv);
        const double g = std::exp(-r2 / (2 * sigma * sigma));
        double& d = c.depth[c.at(u, v)];
        d *= 1.0 - lift * g;
        if (g > 0.3) c.region[c.at(u, v)] = k + 1;
      }
    }
  }
}

void draw_frame(const SceneSpec& s, Rng& rng, Canvas& c) {
  const ValueNoise wall(rng.fork(), 24.0, c.w, c.h);
  const double span = s.max_depth - s.min_depth;
  for (int v = 0; v < c.h; ++v) {
    for (int u = 0; u < c.w; ++u) {
      c.depth[c.at(u, v)] = s.max_depth - span * (0.1 + 0.1 * wall(u, v));
    }
  }
  // Square frame.
  const int left = static_cast<int>(rng.uniform(0.1, 0.3) * c.w);
  const int right = static_cast<int>(rng.uniform(0.7, 0.9) * c.w);
  const int top = static_cast<int>(rng.uniform(0.1, 0.3) * c.h);
  const int bottom = static_cast<int>(rng.uniform(0.7, 0.9) * c.h);
  const int bar = 3 + static_cast<int>(rng.below(3));
  const double frame_depth = s.min_depth + span * rng.uniform(0.35, 0.55);
  for (int v = top; v <= bottom; ++v) {
    for (int u = left; u <= right; ++u) {
      const bool edge = u < left + bar || u > right - bar || v < top + bar || v > bottom - bar;
      if (!edge) continue;
      c.depth[c.at(u, v)] = frame_depth + 0.02 * span * (static_cast<double>(v - top) / c.h);
      c.region[c.at(u, v)] = 1;
    }
  }
  // Thin ropes hanging from the top edge, 1 to 4 px wide.
  const int ropes = 2 + static_cast<int>(rng.below(3));
  for (int k = 0; k < ropes; ++k) {
    const int width = 1 + static_cast<int>(rng.below(4));
    const int u0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(c.w - width)));
    const double rope_depth = s.min_depth + span * rng.uniform(0.0, 0.25);
    const double sway = rng.uniform(-0.15, 0.15);
    for (int v = 0; v < c.h; ++v) {
      const int shift = static_cast<int>(std::lround(sway * v));
      for (int du = 0; du < width; ++du) {
        const int u = std::clamp(u0 + du + shift, 0, c.w - 1);
        c.depth[c.at(u, v)] = rope_depth;
        c.region[c.at(u, v)] = 2 + k;
      }
    }
  }
}

}  // namespace

ValueNoise::ValueNoise(std::uint64_t seed, double wavelength, int width, int height)
    : wavelength_(wavelength) {
  if (!(wavelength > 0)) throw ConfigError("value noise: wavelength must be > 0");
  cols_ = static_cast<int>(std::ceil(width / wavelength)) + 2;
  rows_ = static_cast<int>(std::ceil(height / wavelength)) + 2;
  Rng rng(seed);
  lattice_.resize(static_cast<std::size_t>(cols_) * rows_);
  for (double& x : lattice_) x = rng.uniform(-1.0, 1.0);
}

double ValueNoise::operator()(double u, double v) const {
  const double x = std::clamp(u / wavelength_, 0.0, cols_ - 1.000001);
  const double y = std::clamp(v / wavelength_, 0.0, rows_ - 1.000001);
  const int i = static_cast<int>(x), j = static_cast<int>(y);
  const double fx = fade(x - i), fy = fade(y - j);
  auto l = [&](int a, int b) { return lattice_[static_cast<std::size_t>(b) * cols_ + a]; };
  const double top = l(i, j) + fx * (l(i + 1, j) - l(i, j));
  const double bot = l(i, j + 1) + fx * (l(i + 1, j + 1) - l(i, j + 1));
  return top + fy * (bot - top);
}

std::string to_string(Layout layout) {
  switch (layout) {
    case Layout::kPlane: return "plane";
    case Layout::kCanyon: return "canyon";
    case Layout::kSeafloorBumps: return "seafloor_bumps";
    case Layout::kFrameWithRopes: return "frame_with_ropes";
  }
  return "unknown";
}

Layout parse_layout(const std::string& name) {
  for (auto l : {Layout::kPlane, Layout::kCanyon, Layout::kSeafloorBumps, Layout::kFrameWithRopes}) {
    if (to_string(l) == name) return l;
  }
  throw ConfigError("unknown scene layout '" + name + "'");
}

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) throw ConfigError("scene: width and height must be > 0");
  if (!(min_depth > 0)) throw ConfigError("scene: min_depth must be > 0");
  if (!(max_depth >= min_depth)) throw ConfigError("scene: max_depth below min_depth");
  if (!(max_depth <= far_cap)) throw ConfigError("scene: max_depth exceeds far cap");
  if (!(texture_wavelength > 0)) throw ConfigError("scene: texture wavelength must be > 0");
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Canvas c(spec.width, spec.height);
  switch (spec.layout) {
    case Layout::kPlane: draw_plane(spec, c); break;
    case Layout::kCanyon: draw_canyon(spec, rng, c); break;
    case Layout::kSeafloorBumps: draw_seafloor(spec, rng, c); break;
    case Layout::kFrameWithRopes: draw_frame(spec, rng, c); break;
  }
  for (double& d : c.depth) d = std::clamp(d, spec.min_depth, spec.max_depth);

  // Guide: per-region albedo times fine texture, dimmed with distance.
  const ValueNoise texture(rng.fork(), spec.texture_wavelength, spec.width, spec.height);
  std::vector<double> albedo(16);
  for (double& a : albedo) a = rng.uniform(0.35, 1.0);
  Image guide{spec.width, spec.height, std::vector<double>(c.depth.size())};
  for (int v = 0; v < c.h; ++v) {
    for (int u = 0; u < c.w; ++u) {
      const std::size_t i = c.at(u, v);
      const double a = albedo[static_cast<std::size_t>(c.region[i]) % albedo.size()];
      const double light = std::exp(-0.25 * (c.depth[i] - spec.min_depth));
      guide.values[i] = std::clamp(a * light * (0.75 + 0.25 * texture(u, v)), 0.0, 1.0);
    }
  }
  return {DepthRaster::dense(spec.width, spec.height, DepthSpace::kMetric, std::move(c.depth)),
          std::move(guide)};
}

CameraIntrinsics default_intrinsics(int width, int height) {
  return {static_cast<double>(width), static_cast<double>(width), 0.5 * (width - 1),
          0.5 * (height - 1)};
}

}  // namespace spade::synth
