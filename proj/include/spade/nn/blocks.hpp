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

#ifndef SPADE_NN_BLOCKS_HPP_
#define SPADE_NN_BLOCKS_HPP_

#include <vector>

#include "spade/nn/deform_attn.hpp"
#include "spade/nn/module.hpp"

namespace spade::nn {

/// Channel attention (shared MLP over average- and max-pooled descriptors)
/// followed by spatial attention (7x7 conv over channelwise mean/max maps).
class Cbam : public Module {
 public:
  Cbam(int channels, Rng& rng, int reduction = 8);
  Tensor forward(const Tensor& x) const;

  /// Attention maps of the last call are not kept; these expose the
  /// branches for tests.
  Tensor channel_attention(const Tensor& x) const;  // [N, C, 1, 1]
  Tensor spatial_attention(const Tensor& x) const;  // [N, 1, H, W]

  Linear& mlp_in() { return *fc1_; }
  Linear& mlp_out() { return *fc2_; }
  Conv2d& spatial_conv() { return *spatial_; }

 private:
  Linear* fc1_;
  Linear* fc2_;
  Conv2d* spatial_;
};

/// conv-bn-relu-conv-bn, CBAM on the residual branch, then sum and relu.
class ResCbamBlock : public Module {
 public:
  ResCbamBlock(int channels, Rng& rng);
  Tensor forward(const Tensor& x);

 private:
  Conv2d* conv1_;
  BatchNorm2d* bn1_;
  Conv2d* conv2_;
  BatchNorm2d* bn2_;
  Cbam* cbam_;
};

/// Pre-norm transformer encoder block with deformable attention.
class TransformerBlock : public Module {
 public:
  TransformerBlock(const DeformAttnConfig& attn, Rng& rng, int mlp_ratio = 2);
  Tensor forward(const Tensor& x) const;  // [N, C, H, W]
  DeformableAttention& attention() { return *attn_; }

 private:
  LayerNorm* norm1_;
  DeformableAttention* attn_;
  LayerNorm* norm2_;
  Linear* fc1_;
  Linear* fc2_;
};

struct StageConfig {
  int in_channels = 32;
  int channels = 32;
  int stride = 1;  // 1 or 2
  int conv_blocks = 1;
  int transformer_blocks = 1;
  int heads = 1;
  int grid_downsample = 2;
  int height = 16;  // output feature rows
  int width = 16;   // output feature columns
};

/// One encoder stage: optional strided entry conv, then conv sub-blocks,
/// then transformer sub-blocks.
class CcdtStage : public Module {
 public:
  CcdtStage(const StageConfig& config, Rng& rng);
  Tensor forward(const Tensor& x);
  const StageConfig& config() const { return config_; }

 private:
  StageConfig config_;
  Conv2d* entry_ = nullptr;
  BatchNorm2d* entry_bn_ = nullptr;
  std::vector<ResCbamBlock*> conv_;
  std::vector<TransformerBlock*> transformers_;
};

/// Two-conv residual unit, x + conv(relu(conv(relu(x)))).
class ResidualConvUnit : public Module {
 public:
  ResidualConvUnit(int channels, Rng& rng);
  Tensor forward(const Tensor& x) const;

 private:
  Conv2d* conv1_;
  Conv2d* conv2_;
};

/// Projects the skip feature, adds the bilinearly upsampled deeper feature
/// and refines with a residual conv unit. Output takes the skip's size.
class DptDecoderBlock : public Module {
 public:
  DptDecoderBlock(int skip_channels, int channels, Rng& rng);
  Tensor forward(const Tensor& skip, const Tensor& deeper) const;

 private:
  Conv2d* project_;
  ResidualConvUnit* refine_;
};

/// Coarse-to-fine fusion of four feature maps into one map at the finest
/// level's resolution.
class FeatureFusion : public Module {
 public:
  FeatureFusion(const std::vector<int>& channels, Rng& rng, int out_channels = 32);
  Tensor forward(const std::vector<Tensor>& features) const;
  int out_channels() const { return out_channels_; }

 private:
  std::vector<int> channels_;
  int out_channels_;
  std::vector<Conv2d*> merge_;  // merge_[i] fuses level i with the upsampled deeper result
  Conv2d* out_;
};

}  // namespace spade::nn

#endif  // SPADE_NN_BLOCKS_HPP_
