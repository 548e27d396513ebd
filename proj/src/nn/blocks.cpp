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

#include "spade/nn/blocks.hpp"

#include <algorithm>
#include <string>

#include "spade/core/error.hpp"

namespace spade::nn {

Cbam::Cbam(int channels, Rng& rng, int reduction) {
  const int hidden = std::max(channels / reduction, 2);
  fc1_ = register_module("fc1", std::make_unique<Linear>(channels, hidden, rng));
  fc2_ = register_module("fc2", std::make_unique<Linear>(hidden, channels, rng));
  spatial_ = register_module("spatial", std::make_unique<Conv2d>(2, 1, 7, rng, Conv2dOptions{1, 3, 1}));
}

Tensor Cbam::channel_attention(const Tensor& x) const {
  const auto n = x.dim(0), c = x.dim(1);
  const Tensor avg = reshape(mean_axes(x, {2, 3}), {n, c});
  const Tensor mx = reshape(max_axes(x, {2, 3}), {n, c});
  auto mlp = [&](const Tensor& t) { return fc2_->forward(relu(fc1_->forward(t))); };
  return reshape(sigmoid(add(mlp(avg), mlp(mx))), {n, c, 1, 1});
}

Tensor Cbam::spatial_attention(const Tensor& x) const {
  const Tensor pooled = concat({mean_axes(x, {1}), max_axes(x, {1})}, 1);
  return sigmoid(spatial_->forward(pooled));
}

Tensor Cbam::forward(const Tensor& x) const {
  if (x.rank() != 4) throw ShapeError("cbam expects [N, C, H, W], got " + to_string(x.shape()));
  const Tensor refined = mul(x, channel_attention(x));
  return mul(refined, spatial_attention(refined));
}

ResCbamBlock::ResCbamBlock(int channels, Rng& rng) {
  conv1_ = register_module("conv1", std::make_unique<Conv2d>(channels, channels, 3, rng,
                                                             Conv2dOptions{1, 1, 1}, false));
  bn1_ = register_module("bn1", std::make_unique<BatchNorm2d>(channels));
  conv2_ = register_module("conv2", std::make_unique<Conv2d>(channels, channels, 3, rng,
                                                             Conv2dOptions{1, 1, 1}, false));
  bn2_ = register_module("bn2", std::make_unique<BatchNorm2d>(channels));
  cbam_ = register_module("cbam", std::make_unique<Cbam>(channels, rng));
}

Tensor ResCbamBlock::forward(const Tensor& x) {
  Tensor y = relu(bn1_->forward(conv1_->forward(x)));
  y = cbam_->forward(bn2_->forward(conv2_->forward(y)));
  return relu(add(x, y));
}

TransformerBlock::TransformerBlock(const DeformAttnConfig& attn, Rng& rng, int mlp_ratio) {
  const int c = attn.channels;
  norm1_ = register_module("norm1", std::make_unique<LayerNorm>(c));
  attn_ = register_module("attn", std::make_unique<DeformableAttention>(attn, rng));
  norm2_ = register_module("norm2", std::make_unique<LayerNorm>(c));
  fc1_ = register_module("fc1", std::make_unique<Linear>(c, c * mlp_ratio, rng));
  fc2_ = register_module("fc2", std::make_unique<Linear>(c * mlp_ratio, c, rng));
}

Tensor TransformerBlock::forward(const Tensor& x) const {
  const auto h = x.dim(2), w = x.dim(3);
  Tensor t = to_tokens(x);
  t = add(t, attn_->forward(norm1_->forward(t)));
  t = add(t, fc2_->forward(gelu(fc1_->forward(norm2_->forward(t)))));
  return from_tokens(t, h, w);
}

CcdtStage::CcdtStage(const StageConfig& config, Rng& rng) : config_(config) {
  if (config.channels <= 0 || config.in_channels <= 0 || config.conv_blocks < 0 ||
      config.transformer_blocks < 0 || (config.stride != 1 && config.stride != 2)) {
    throw ConfigError("encoder stage: invalid widths, counts or stride");
  }
  if (config.stride == 2 || config.in_channels != config.channels) {
    const int k = config.stride == 2 ? 3 : 1;
    entry_ = register_module(
        "entry", std::make_unique<Conv2d>(config.in_channels, config.channels, k, rng,
                                          Conv2dOptions{config.stride, k / 2, 1}, false));
    entry_bn_ = register_module("entry_bn", std::make_unique<BatchNorm2d>(config.channels));
  }
  for (int i = 0; i < config.conv_blocks; ++i) {
    conv_.push_back(register_module("conv" + std::to_string(i),
                                    std::make_unique<ResCbamBlock>(config.channels, rng)));
  }
  DeformAttnConfig attn;
  attn.channels = config.channels;
  attn.heads = config.heads;
  attn.height = config.height;
  attn.width = config.width;
  attn.grid_downsample = config.grid_downsample;
  for (int i = 0; i < config.transformer_blocks; ++i) {
    transformers_.push_back(register_module("transformer" + std::to_string(i),
                                            std::make_unique<TransformerBlock>(attn, rng)));
  }
}

Tensor CcdtStage::forward(const Tensor& x) {
  if (x.rank() != 4 || x.dim(1) != config_.in_channels) {
    throw ShapeError("encoder stage expects " + std::to_string(config_.in_channels) +
                     " channels, got " + to_string(x.shape()));
  }
  Tensor y = entry_ ? relu(entry_bn_->forward(entry_->forward(x))) : x;
  if (y.dim(2) != config_.height || y.dim(3) != config_.width) {
    throw ShapeError("encoder stage output " + to_string(y.shape()) + " does not match " +
                     std::to_string(config_.height) + "x" + std::to_string(config_.width));
  }
  for (auto* block : conv_) y = block->forward(y);
  for (auto* block : transformers_) y = block->forward(y);
  return y;
}

ResidualConvUnit::ResidualConvUnit(int channels, Rng& rng) {
  conv1_ = register_module("conv1", std::make_unique<Conv2d>(channels, channels, 3, rng,
                                                             Conv2dOptions{1, 1, 1}));
  conv2_ = register_module("conv2", std::make_unique<Conv2d>(channels, channels, 3, rng,
                                                             Conv2dOptions{1, 1, 1}));
}

Tensor ResidualConvUnit::forward(const Tensor& x) const {
  return add(x, conv2_->forward(relu(conv1_->forward(relu(x)))));
}

DptDecoderBlock::DptDecoderBlock(int skip_channels, int channels, Rng& rng) {
  project_ = register_module("project", std::make_unique<Conv2d>(skip_channels, channels, 1, rng));
  refine_ = register_module("refine", std::make_unique<ResidualConvUnit>(channels, rng));
}

Tensor DptDecoderBlock::forward(const Tensor& skip, const Tensor& deeper) const {
  if (skip.rank() != 4 || deeper.rank() != 4 || (skip.dim(2) + 1) / 2 != deeper.dim(2) ||
      (skip.dim(3) + 1) / 2 != deeper.dim(3)) {
    throw ShapeError("decoder block: deeper " + to_string(deeper.shape()) +
                     " is not half the size of skip " + to_string(skip.shape()));
  }
  const Tensor up = upsample_onto(deeper, skip.dim(2), skip.dim(3));
  return refine_->forward(add(project_->forward(skip), up));
}

FeatureFusion::FeatureFusion(const std::vector<int>& channels, Rng& rng, int out_channels)
    : channels_(channels), out_channels_(out_channels) {
  if (channels.size() != 4) throw ConfigError("feature fusion needs four levels");
  merge_.resize(3);
  for (int i = 2; i >= 0; --i) {
    const int deeper = i == 2 ? channels[3] : channels[static_cast<std::size_t>(i) + 1];
    merge_[static_cast<std::size_t>(i)] = register_module(
        "merge" + std::to_string(i),
        std::make_unique<Conv2d>(channels[static_cast<std::size_t>(i)] + deeper,
                                 channels[static_cast<std::size_t>(i)], 1, rng));
  }
  out_ = register_module("out", std::make_unique<Conv2d>(channels[0], out_channels, 1, rng));
}

Tensor FeatureFusion::forward(const std::vector<Tensor>& features) const {
  if (features.size() != 4) throw ShapeError("feature fusion needs four levels");
  for (std::size_t i = 0; i < 4; ++i) {
    if (features[i].rank() != 4 || features[i].dim(1) != channels_[i]) {
      throw ShapeError("feature fusion level " + std::to_string(i) + ": expected " +
                       std::to_string(channels_[i]) + " channels, got " +
                       to_string(features[i].shape()));
    }
  }
  Tensor cur = features[3];
  for (int i = 2; i >= 0; --i) {
    const Tensor& finer = features[static_cast<std::size_t>(i)];
    const Tensor up = resize_bilinear(cur, finer.dim(2), finer.dim(3));
    cur = merge_[static_cast<std::size_t>(i)]->forward(concat({finer, up}, 1));
  }
  return out_->forward(cur);
}

}  // namespace spade::nn
