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

#include "spade/nn/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spade/core/error.hpp"

namespace spade::nn {

void CcdtConfig::validate() const {
  if (input_height < 32 || input_width < 32) {
    throw ConfigError("network input " + std::to_string(input_height) + "x" +
                      std::to_string(input_width) + " is smaller than 32x32");
  }
  for (int i = 0; i < 4; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (widths[k] <= 0) throw ConfigError("stage " + std::to_string(i + 1) + ": width must be > 0");
    if (conv_blocks[k] < 0 || transformer_blocks[k] < 0) {
      throw ConfigError("stage " + std::to_string(i + 1) + ": block counts must be >= 0");
    }
    if (heads[k] <= 0 || widths[k] % heads[k] != 0) {
      throw ConfigError("stage " + std::to_string(i + 1) + ": width " +
                        std::to_string(widths[k]) + " not divisible by " +
                        std::to_string(heads[k]) + " heads");
    }
    const int h = level_height(i + 2), w = level_width(i + 2);
    if (grid_downsample[k] < 1 || h % grid_downsample[k] != 0 || w % grid_downsample[k] != 0) {
      throw ConfigError("stage " + std::to_string(i + 1) + ": " + std::to_string(h) + "x" +
                        std::to_string(w) + " features not divisible by grid factor " +
                        std::to_string(grid_downsample[k]));
    }
  }
  if (embed_channels <= 0 || fused_channels <= 0 || decoder_channels <= 0) {
    throw ConfigError("embedding, fusion and decoder widths must be > 0");
  }
}

StageConfig CcdtConfig::stage(int index) const {
  const auto k = static_cast<std::size_t>(index);
  StageConfig s;
  s.in_channels = index == 0 ? 2 * embed_channels + fused_channels : widths[k - 1];
  s.channels = widths[k];
  s.stride = index == 0 ? 1 : 2;
  s.conv_blocks = conv_blocks[k];
  s.transformer_blocks = transformer_blocks[k];
  s.heads = heads[k];
  s.grid_downsample = grid_downsample[k];
  s.height = level_height(index + 2);
  s.width = level_width(index + 2);
  return s;
}

double neutral_logit() { return std::log(std::expm1(1.0)); }

RefinementNet::RefinementNet(const CcdtConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  const int e = config_.embed_channels, d = config_.decoder_channels;
  const Conv2dOptions same{1, 1, 1}, down{2, 1, 1};
  embed_z_ = register_module("embed_z", std::make_unique<Conv2d>(1, e, 3, rng, same));
  embed_eps_ = register_module("embed_eps", std::make_unique<Conv2d>(1, e, 3, rng, same));
  down1_ = register_module("down1", std::make_unique<Conv2d>(2 * e, 2 * e, 3, rng, down, false));
  down1_bn_ = register_module("down1_bn", std::make_unique<BatchNorm2d>(2 * e));
  down2_ = register_module("down2", std::make_unique<Conv2d>(2 * e, 2 * e, 3, rng, down, false));
  down2_bn_ = register_module("down2_bn", std::make_unique<BatchNorm2d>(2 * e));
  for (int i = 0; i < 4; ++i) {
    stages_.push_back(register_module("stage" + std::to_string(i + 1),
                                      std::make_unique<CcdtStage>(config_.stage(i), rng)));
  }
  bottleneck_ = register_module("bottleneck", std::make_unique<Conv2d>(config_.widths[3], d, 1, rng));
  const int skips[4] = {config_.widths[2], config_.widths[1], config_.widths[0], 2 * e};
  for (int i = 0; i < 4; ++i) {
    decoder_.push_back(register_module("decoder" + std::to_string(i + 1),
                                       std::make_unique<DptDecoderBlock>(skips[i], d, rng)));
  }
  head_ = register_module("head", std::make_unique<Conv2d>(d + 2 * e + 1, d / 2 > 0 ? d / 2 : 1,
                                                           3, rng, same));
  out_ = register_module("out", std::make_unique<Conv2d>(d / 2 > 0 ? d / 2 : 1, 1, 1, rng));
  make_neutral();
}

void RefinementNet::make_neutral() {
  auto& w = out_->weight().mutable_data();
  std::fill(w.begin(), w.end(), 0.0);
  auto& b = out_->bias().mutable_data();
  std::fill(b.begin(), b.end(), 0.0);
}

Tensor RefinementNet::forward(const Tensor& z, const Tensor& eps, const Tensor& fused) {
  const std::int64_t h = config_.input_height, w = config_.input_width;
  auto check = [&](const Tensor& t, std::int64_t c, std::int64_t th, std::int64_t tw,
                   const char* what) {
    if (t.rank() != 4 || t.dim(1) != c || t.dim(2) != th || t.dim(3) != tw) {
      throw ShapeError(std::string("refinement net: ") + what + " expected [N, " +
                       std::to_string(c) + ", " + std::to_string(th) + ", " +
                       std::to_string(tw) + "], got " + to_string(t.shape()));
    }
  };
  check(z, 1, h, w, "aligned depth");
  check(eps, 1, h, w, "scale map");
  check(fused, config_.fused_channels, config_.level_height(2), config_.level_width(2), "fused features");

  const Tensor eps_centred = add_scalar(eps, -1.0);
  const Tensor full = concat({relu(embed_z_->forward(z)), relu(embed_eps_->forward(eps_centred))}, 1);
  const Tensor half = relu(down1_bn_->forward(down1_->forward(full)));
  const Tensor quarter = relu(down2_bn_->forward(down2_->forward(half)));

  std::vector<Tensor> enc;
  Tensor x = concat({quarter, fused}, 1);
  for (auto* stage : stages_) {
    x = stage->forward(x);
    enc.push_back(x);
  }
  Tensor dec = bottleneck_->forward(enc[3]);
  dec = decoder_[0]->forward(enc[2], dec);
  dec = decoder_[1]->forward(enc[1], dec);
  dec = decoder_[2]->forward(enc[0], dec);
  dec = decoder_[3]->forward(half, dec);

  const Tensor up = upsample_onto(dec, h, w);
  const Tensor feat = relu(head_->forward(concat({up, full, eps_centred}, 1)));
  return softplus(add_scalar(out_->forward(feat), neutral_logit()));
}

}  // namespace spade::nn
