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

#include "spade/synth/pyramid.hpp"

#include <string>

#include "spade/core/error.hpp"

namespace spade::synth {

FeaturePyramid::FeaturePyramid(Rng& rng, std::array<int, 4> channels, int stem_channels)
    : channels_(channels) {
  const nn::Conv2dOptions down{2, 1, 1};
  stem_ = register_module("stem", std::make_unique<nn::Conv2d>(1, stem_channels, 3, rng, down));
  int in = stem_channels;
  for (std::size_t i = 0; i < 4; ++i) {
    levels_[i] = register_module("level" + std::to_string(i + 1),
                                 std::make_unique<nn::Conv2d>(in, channels[i], 3, rng, down));
    in = channels[i];
  }
}

std::vector<nn::Tensor> FeaturePyramid::forward(const nn::Tensor& guide) const {
  if (guide.rank() != 4 || guide.dim(1) != 1 || guide.dim(2) < 32 || guide.dim(3) < 32) {
    throw ShapeError("feature pyramid expects [N, 1, H, W] with H, W >= 32, got " +
                     nn::to_string(guide.shape()));
  }
  std::vector<nn::Tensor> out;
  nn::Tensor x = nn::relu(stem_->forward(nn::add_scalar(guide, -0.5)));
  for (auto* level : levels_) {
    x = nn::relu(level->forward(x));
    out.push_back(x);
  }
  return out;
}

}  // namespace spade::synth
