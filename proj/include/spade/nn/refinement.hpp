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

#ifndef SPADE_NN_REFINEMENT_HPP_
#define SPADE_NN_REFINEMENT_HPP_

#include <array>
#include <vector>

#include "spade/nn/blocks.hpp"

namespace spade::nn {

/// Encoder layout. Stages run at 1/4, 1/8, 1/16 and 1/32 of the input.
struct CcdtConfig {
  int input_height = 64;
  int input_width = 96;
  std::array<int, 4> widths{32, 64, 96, 128};
  std::array<int, 4> conv_blocks{1, 1, 2, 2};
  std::array<int, 4> transformer_blocks{1, 1, 2, 2};
  std::array<int, 4> heads{1, 2, 3, 4};
  std::array<int, 4> grid_downsample{2, 2, 2, 1};
  int embed_channels = 8;
  int fused_channels = 32;
  int decoder_channels = 32;

  /// Throws ConfigError with the offending field.
  void validate() const;
  StageConfig stage(int index) const;
  // Side lengths after `level` padded stride-2 layers.
  int level_height(int level) const { return halve(input_height, level); }
  int level_width(int level) const { return halve(input_width, level); }

 private:
  static int halve(int n, int times) {
    for (int i = 0; i < times; ++i) n = (n + 1) / 2;
    return n;
  }
};

/// softplus^-1(1) = log(e - 1); the head adds it so a zero logit maps to 1.
double neutral_logit();

/// Maps aligned inverse depth, the densified scale map and fused image
/// features to a positive per-pixel scale correction.
class RefinementNet : public Module {
 public:
  RefinementNet(const CcdtConfig& config, Rng& rng);

  /// z, eps: [N, 1, H, W]; fused: [N, fused_channels, H/4, W/4].
  /// Returns [N, 1, H, W], strictly positive.
  Tensor forward(const Tensor& z, const Tensor& eps, const Tensor& fused);

  /// Zeroes the output conv so the correction is exactly neutral.
  void make_neutral();
  const CcdtConfig& config() const { return config_; }

 private:
  CcdtConfig config_;
  Conv2d* embed_z_;
  Conv2d* embed_eps_;
  Conv2d* down1_;
  BatchNorm2d* down1_bn_;
  Conv2d* down2_;
  BatchNorm2d* down2_bn_;
  std::vector<CcdtStage*> stages_;
  Conv2d* bottleneck_;
  std::vector<DptDecoderBlock*> decoder_;  // 1/16, 1/8, 1/4, 1/2
  Conv2d* head_;
  Conv2d* out_;
};

}  // namespace spade::nn

#endif  // SPADE_NN_REFINEMENT_HPP_
