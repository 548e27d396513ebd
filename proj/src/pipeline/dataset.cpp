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

#include "spade/pipeline/dataset.hpp"

#include "spade/core/rng.hpp"
#include "spade/pipeline/parallel.hpp"

namespace spade::pipeline {

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

std::uint64_t frame_seed(std::uint64_t seed, Split split, int index) {
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + (static_cast<std::uint64_t>(split) << 32) +
                    static_cast<std::uint64_t>(index);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Frame make_frame(const RunConfig& cfg, Split split, int index) {
  const auto& d = cfg.data;
  Rng rng(frame_seed(cfg.seed, split, index));
  Frame f;
  constexpr synth::Layout kLayouts[] = {synth::Layout::kSeafloorBumps, synth::Layout::kCanyon,
                                        synth::Layout::kFrameWithRopes};
  f.scene.layout = kLayouts[rng.below(3)];
  f.scene.width = cfg.network.input_width;
  f.scene.height = cfg.network.input_height;
  f.scene.min_depth = rng.uniform(d.min_depth_lo, d.min_depth_hi);
  f.scene.max_depth = rng.uniform(d.max_depth_lo, d.max_depth_hi);
  f.scene.far_cap = cfg.range_cap;
  f.scene.seed = rng.fork();

  f.oracle.s_true = rng.uniform(d.s_lo, d.s_hi);
  f.oracle.t_true = rng.uniform(d.t_lo, d.t_hi);
  f.oracle.bias_amplitude = d.bias_amplitude;
  f.oracle.bias_wavelength = d.bias_wavelength;
  f.oracle.noise_sigma = d.noise_sigma;
  f.oracle.seed = rng.fork();

  auto scene = synth::generate_scene(f.scene);
  f.gt = std::move(scene.gt);
  f.guide = std::move(scene.guide);
  f.relative = synth::oracle_relative(f.gt, f.oracle);
  f.intrinsics = synth::default_intrinsics(f.scene.width, f.scene.height);

  sim::PatternSpec pattern;
  pattern.kind = sim::PatternKind::kFeatureLike;
  pattern.count = d.points;
  pattern.seed = rng.fork();
  f.points = sim::sample_pattern(f.gt, pattern, &f.guide).points;
  return f;
}

std::vector<Frame> make_split(const RunConfig& cfg, Split split) {
  const int n = split == Split::kTrain ? cfg.data.train_frames
                : split == Split::kVal ? cfg.data.val_frames
                                       : cfg.data.test_frames;
  std::vector<Frame> frames(static_cast<std::size_t>(n));
  parallel_for(n, [&](int i) { frames[static_cast<std::size_t>(i)] = make_frame(cfg, split, i); });
  return frames;
}

}  // namespace spade::pipeline
