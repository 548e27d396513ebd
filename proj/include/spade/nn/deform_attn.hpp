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

#ifndef SPADE_NN_DEFORM_ATTN_HPP_
#define SPADE_NN_DEFORM_ATTN_HPP_

#include "spade/nn/module.hpp"

namespace spade::nn {

/// Shape of one deformable multi-head attention layer. The relative-bias
/// table is sized from the feature map, so height and width are fixed here.
struct DeformAttnConfig {
  int channels = 32;
  int heads = 1;
  int height = 8;            // feature rows
  int width = 8;             // feature columns
  int grid_downsample = 2;   // feature pixels per reference-grid cell
  double offset_range = 4.0; // max |offset|, in grid cells
  int offset_kernel = 5;     // depthwise kernel of the offset network

  int head_dim() const { return channels / heads; }
  int grid_height() const { return height / grid_downsample; }
  int grid_width() const { return width / grid_downsample; }
  /// Throws ConfigError on C % N != 0, non-divisible grids, etc.
  void validate() const;
};

/// Intermediate values exposed for tests and diagnostics.
struct DeformAttnTrace {
  Tensor offsets;    // [N, 2, Hg, Wg] in grid cells
  Tensor positions;  // [N, Lk, 2] deformed (row, col) in feature pixels
  Tensor heads;      // [N, L, C] concatenated head outputs before W0
};

/// Deformable attention: queries from every token, keys and values from
/// features bilinearly sampled at a reference grid shifted by offsets that
/// a small conv network predicts from the queries, plus a relative-position
/// bias interpolated from a learnable table at the continuous query-key
/// displacement.
class DeformableAttention : public Module {
 public:
  DeformableAttention(const DeformAttnConfig& config, Rng& rng);

  /// tokens [N, H*W, C] -> [N, H*W, C].
  Tensor forward(const Tensor& tokens, DeformAttnTrace* trace = nullptr) const;
  /// Convenience wrapper on [N, C, H, W].
  Tensor forward_image(const Tensor& x, DeformAttnTrace* trace = nullptr) const;

  const DeformAttnConfig& config() const { return config_; }
  Linear& query() { return *q_proj_; }
  Linear& key() { return *k_proj_; }
  Linear& value() { return *v_proj_; }
  Linear& output() { return *out_proj_; }
  Conv2d& offset_depthwise() { return *offset_dw_; }
  Conv2d& offset_pointwise() { return *offset_pw_; }
  Tensor& bias_table() { return bias_table_; }

 private:
  DeformAttnConfig config_;
  Linear* q_proj_;
  Linear* k_proj_;
  Linear* v_proj_;
  Linear* out_proj_;
  Conv2d* offset_dw_;
  Conv2d* offset_pw_;
  Tensor bias_table_;  // [heads, 2Hg - 1, 2Wg - 1]
  Tensor reference_;   // [1, Lk, 2]
  Tensor query_pos_;   // [1, L, 1, 2] in grid units, shifted into table coords
};

}  // namespace spade::nn

#endif  // SPADE_NN_DEFORM_ATTN_HPP_
