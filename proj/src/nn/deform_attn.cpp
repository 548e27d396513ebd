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

#include "spade/nn/deform_attn.hpp"

#include <cmath>
#include <string>

#include "spade/core/error.hpp"

namespace spade::nn {

void DeformAttnConfig::validate() const {
  if (channels <= 0 || heads <= 0 || channels % heads != 0) {
    throw ConfigError("deformable attention: " + std::to_string(channels) +
                      " channels not divisible into " + std::to_string(heads) + " heads");
  }
  if (grid_downsample < 1) throw ConfigError("deformable attention: grid_downsample < 1");
  if (height <= 0 || width <= 0 || height % grid_downsample != 0 ||
      width % grid_downsample != 0) {
    throw ConfigError("deformable attention: feature size " + std::to_string(height) + "x" +
                      std::to_string(width) + " not divisible by grid factor " +
                      std::to_string(grid_downsample));
  }
  if (!(offset_range > 0.0)) throw ConfigError("deformable attention: offset_range <= 0");
  if (offset_kernel < 1 || offset_kernel % 2 == 0) {
    throw ConfigError("deformable attention: offset kernel must be odd");
  }
}

DeformableAttention::DeformableAttention(const DeformAttnConfig& config, Rng& rng)
    : config_(config) {
  config_.validate();
  const int c = config_.channels;
  const int g = config_.grid_downsample;
  q_proj_ = register_module("q", std::make_unique<Linear>(c, c, rng));
  k_proj_ = register_module("k", std::make_unique<Linear>(c, c, rng));
  v_proj_ = register_module("v", std::make_unique<Linear>(c, c, rng));
  out_proj_ = register_module("out", std::make_unique<Linear>(c, c, rng));
  offset_dw_ = register_module(
      "offset_dw", std::make_unique<Conv2d>(c, c, config_.offset_kernel, rng,
                                            Conv2dOptions{g, config_.offset_kernel / 2, c}));
  offset_pw_ = register_module("offset_pw", std::make_unique<Conv2d>(c, 2, 1, rng));
  // Start from the undeformed grid.
  std::fill(offset_pw_->weight().mutable_data().begin(), offset_pw_->weight().mutable_data().end(),
            0.0);

  const int hg = config_.grid_height(), wg = config_.grid_width();
  bias_table_ = register_parameter("rel_bias",
                                   Tensor::zeros({config_.heads, 2 * hg - 1, 2 * wg - 1}));

  // Grid node (a, b) sits at the centre of its g x g cell.
  std::vector<double> ref;
  ref.reserve(static_cast<std::size_t>(hg) * wg * 2);
  const double centre = 0.5 * (g - 1);
  for (int a = 0; a < hg; ++a) {
    for (int b = 0; b < wg; ++b) {
      ref.push_back(a * g + centre);
      ref.push_back(b * g + centre);
    }
  }
  reference_ = Tensor::from({1, static_cast<std::int64_t>(hg) * wg, 2}, std::move(ref));

  // Query positions in grid units, offset so a zero displacement lands on
  // the table centre (hg - 1, wg - 1).
  std::vector<double> qpos;
  qpos.reserve(static_cast<std::size_t>(config_.height) * config_.width * 2);
  for (int i = 0; i < config_.height; ++i) {
    for (int j = 0; j < config_.width; ++j) {
      qpos.push_back(static_cast<double>(i) / g + (hg - 1));
      qpos.push_back(static_cast<double>(j) / g + (wg - 1));
    }
  }
  query_pos_ =
      Tensor::from({1, static_cast<std::int64_t>(config_.height) * config_.width, 1, 2},
                   std::move(qpos));
}

Tensor DeformableAttention::forward(const Tensor& tokens, DeformAttnTrace* trace) const {
  const std::int64_t h = config_.height, w = config_.width;
  const std::int64_t l = h * w;
  if (tokens.rank() != 3 || tokens.dim(1) != l || tokens.dim(2) != config_.channels) {
    throw ShapeError("deformable attention expects [N, " + std::to_string(l) + ", " +
                     std::to_string(config_.channels) + "], got " + to_string(tokens.shape()));
  }
  const std::int64_t n = tokens.dim(0);
  const std::int64_t c = config_.channels, heads = config_.heads, d = config_.head_dim();
  const std::int64_t hg = config_.grid_height(), wg = config_.grid_width(), lk = hg * wg;
  const double g = config_.grid_downsample;

  const Tensor image = from_tokens(tokens, h, w);
  const Tensor q = q_proj_->forward(tokens);

  // Offsets in grid cells, bounded by tanh.
  Tensor offsets = offset_pw_->forward(gelu(offset_dw_->forward(from_tokens(q, h, w))));
  offsets = scale(tanh(offsets), config_.offset_range);
  const Tensor shift = scale(reshape(permute(offsets, {0, 2, 3, 1}), {n, lk, 2}), g);
  const Tensor positions = add(reference_, shift);

  const Tensor sampled = permute(bilinear_sample(image, positions), {0, 2, 1});  // [N, Lk, C]
  const Tensor k = k_proj_->forward(sampled);
  const Tensor v = v_proj_->forward(sampled);

  auto split = [&](const Tensor& t, std::int64_t len) {
    return reshape(permute(reshape(t, {n, len, heads, d}), {0, 2, 1, 3}), {n * heads, len, d});
  };
  const Tensor qh = split(q, l), kh = split(k, lk), vh = split(v, lk);
  Tensor scores = scale(matmul(qh, permute(kh, {0, 2, 1})), 1.0 / std::sqrt(static_cast<double>(d)));

  // Relative bias: table coordinates (query - key) / g + centre.
  const Tensor key_grid = scale(reshape(positions, {n, 1, lk, 2}), 1.0 / g);
  const Tensor table_loc = reshape(sub(query_pos_, key_grid), {n, l * lk, 2});
  const Tensor table = reshape(bias_table_, {1, heads, 2 * hg - 1, 2 * wg - 1});
  const Tensor bias = reshape(bilinear_sample(table, table_loc), {n * heads, l, lk});
  scores = add(scores, bias);

  const Tensor attn = softmax(scores);
  const Tensor mixed =
      reshape(permute(reshape(matmul(attn, vh), {n, heads, l, d}), {0, 2, 1, 3}), {n, l, c});
  if (trace) {
    trace->offsets = offsets;
    trace->positions = positions;
    trace->heads = mixed;
  }
  return out_proj_->forward(mixed);
}

Tensor DeformableAttention::forward_image(const Tensor& x, DeformAttnTrace* trace) const {
  return from_tokens(forward(to_tokens(x), trace), x.dim(2), x.dim(3));
}

}  // namespace spade::nn
