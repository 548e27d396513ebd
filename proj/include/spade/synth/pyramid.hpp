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

#ifndef SPADE_SYNTH_PYRAMID_HPP_
#define SPADE_SYNTH_PYRAMID_HPP_

#include <array>
#include <vector>

#include "spade/nn/module.hpp"

namespace spade::synth {

/// Trainable strided-conv encoder over the guide image standing in for a
/// frozen backbone's multi-scale features. Levels sit at 1/4, 1/8, 1/16
/// and 1/32 of the input.
class FeaturePyramid : public nn::Module {
 public:
  explicit FeaturePyramid(Rng& rng, std::array<int, 4> channels = {16, 24, 32, 48},
                          int stem_channels = 8);

  /// guide [N, 1, H, W] with H, W divisible by 32.
  std::vector<nn::Tensor> forward(const nn::Tensor& guide) const;
  const std::array<int, 4>& channels() const { return channels_; }

 private:
  std::array<int, 4> channels_;
  nn::Conv2d* stem_;
  std::array<nn::Conv2d*, 4> levels_{};
};

}  // namespace spade::synth

#endif  // SPADE_SYNTH_PYRAMID_HPP_
