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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "spade/core/error.hpp"
#include "spade/core/rng.hpp"
#include "spade/nn/blocks.hpp"
#include "spade/nn/deform_attn.hpp"
#include "spade/nn/ops.hpp"
#include "spade/nn/refinement.hpp"
#include "spade/synth/pyramid.hpp"

using namespace spade;
using namespace spade::nn;

namespace {

Tensor random(const Shape& shape, Rng& rng, double lo = -1, double hi = 1) {
  std::vector<double> v(std::size_t(numel(shape)));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor::from(shape, v);
}

void fill(Tensor& t, double v) { std::fill(t.mutable_data().begin(), t.mutable_data().end(), v); }

void set_identity(Linear& l, int c) {
  fill(l.weight(), 0.0);
  for (int i = 0; i < c; ++i) l.weight().mutable_data()[i * c + i] = 1.0;
  fill(l.bias(), 0.0);
}

std::unique_ptr<DeformableAttention> identity_attention(int c, int heads, int h, int w, Rng& rng) {
  DeformAttnConfig cfg;
  cfg.channels = c;
  cfg.heads = heads;
  cfg.height = h;
  cfg.width = w;
  cfg.grid_downsample = 1;
  cfg.offset_kernel = 3;
  auto attn = std::make_unique<DeformableAttention>(cfg, rng);
  set_identity(attn->query(), c);
  set_identity(attn->key(), c);
  set_identity(attn->value(), c);
  set_identity(attn->output(), c);
  fill(attn->offset_pointwise().weight(), 0.0);
  fill(attn->offset_pointwise().bias(), 0.0);
  fill(attn->bias_table(), 0.0);
  return attn;
}

}  // namespace

TEST_CASE("deformable attention reduces to dense attention") {
  Rng rng(21);
  const int dims[4][4] = {{4, 1, 3, 4}, {6, 2, 4, 4}, {6, 3, 2, 5}, {8, 4, 3, 3}};
  for (const auto& d : dims) {
    auto attn = identity_attention(d[0], d[1], d[2], d[3], rng);
    const int len = d[2] * d[3];
    const Tensor x = random({2, len, d[0]}, rng, -2, 2);
    DeformAttnTrace trace;
    const Tensor y = attn->forward(x, &trace);
    for (double o : trace.offsets.data()) CHECK(o == 0.0);
    for (int n = 0; n < 2; ++n) {
      const std::vector<double> xs(x.data().begin() + n * len * d[0], x.data().begin() + (n + 1) * len * d[0]);
      const auto ref = oracle::dense_attention(xs, len, d[0], d[1]);
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(y.data()[n * len * d[0] + i] - ref[i]) <= 1e-10);
    }
  }
}

TEST_CASE("constant values give a constant output") {
  Rng rng(22);
  DeformAttnConfig cfg;
  cfg.channels = 4;
  cfg.heads = 2;
  cfg.height = 4;
  cfg.width = 6;
  DeformableAttention attn(cfg, rng);
  set_identity(attn.output(), 4);
  fill(attn.value().weight(), 0.0);
  fill(attn.value().bias(), 0.75);
  for (double& b : attn.bias_table().mutable_data()) b = rng.uniform(-1, 1);
  const Tensor y = attn.forward(random({1, 24, 4}, rng));
  for (double v : y.data()) CHECK(v == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("offsets stay within range and move the keys") {
  Rng rng(23);
  DeformAttnConfig cfg;
  cfg.channels = 4;
  cfg.height = 8;
  cfg.width = 8;
  cfg.offset_range = 1.5;
  DeformableAttention attn(cfg, rng);
  for (double& w : attn.offset_pointwise().weight().mutable_data()) w = rng.uniform(-3, 3);
  DeformAttnTrace trace;
  attn.forward(random({1, 64, 4}, rng), &trace);
  CHECK(trace.offsets.shape() == Shape{1, 2, 4, 4});
  double biggest = 0;
  for (double o : trace.offsets.data()) biggest = std::max(biggest, std::abs(o));
  CHECK(biggest > 0.0);
  CHECK(biggest <= 1.5);
  // reference node (0, 0) sits at pixel (0.5, 0.5) for a 2x grid
  CHECK(trace.positions.data()[0] == doctest::Approx(0.5 + 2 * trace.offsets.data()[0]));
}

TEST_CASE("attention configuration is checked") {
  Rng rng(24);
  DeformAttnConfig cfg;
  cfg.channels = 6;
  cfg.heads = 4;
  CHECK_THROWS_AS(DeformableAttention(cfg, rng), ConfigError);
  cfg.heads = 2;
  cfg.height = 7;
  CHECK_THROWS_AS(DeformableAttention(cfg, rng), ConfigError);
}

TEST_CASE("cbam saturates to identity and never amplifies") {
  Rng rng(25);
  Cbam cbam(8, rng);
  const Tensor x = random({2, 8, 5, 6}, rng);
  const Tensor y = cbam.forward(x);
  for (std::size_t i = 0; i < y.data().size(); ++i) CHECK(std::abs(y.data()[i]) <= std::abs(x.data()[i]));
  fill(cbam.mlp_out().weight(), 0.0);
  fill(cbam.mlp_out().bias(), 40.0);
  fill(cbam.spatial_conv().weight(), 0.0);
  fill(cbam.spatial_conv().bias(), 40.0);
  const Tensor z = cbam.forward(x);
  for (std::size_t i = 0; i < z.data().size(); ++i) CHECK(std::abs(z.data()[i] - x.data()[i]) < 1e-15);
}

TEST_CASE("stage shapes follow the configuration") {
  Rng rng(26);
  StageConfig sc;
  sc.in_channels = 8;
  sc.channels = 12;
  sc.stride = 2;
  sc.heads = 2;
  sc.height = 4;
  sc.width = 6;
  for (auto [conv, tr] : {std::pair{1, 1}, std::pair{0, 1}, std::pair{2, 0}}) {
    sc.conv_blocks = conv;
    sc.transformer_blocks = tr;
    CcdtStage stage(sc, rng);
    CHECK(stage.forward(random({2, 8, 8, 12}, rng)).shape() == Shape{2, 12, 4, 6});
  }
  CcdtStage stage(sc, rng);
  CHECK_THROWS_AS(stage.forward(random({1, 8, 10, 12}, rng)), ShapeError);
}

TEST_CASE("decoder block") {
  Rng rng(27);
  DptDecoderBlock dec(5, 4, rng);
  const Tensor skip = random({1, 5, 6, 8}, rng);
  CHECK(dec.forward(skip, random({1, 4, 3, 4}, rng)).shape() == Shape{1, 4, 6, 8});
  CHECK_THROWS_AS(dec.forward(skip, random({1, 4, 4, 4}, rng)), ShapeError);
}

TEST_CASE("feature pyramid and fusion") {
  Rng rng(28);
  synth::FeaturePyramid pyr(rng);
  const auto levels = pyr.forward(random({1, 1, 64, 96}, rng, 0, 1));
  REQUIRE(levels.size() == 4);
  CHECK(levels[0].shape() == Shape{1, 16, 16, 24});
  CHECK(levels[3].shape() == Shape{1, 48, 2, 3});
  FeatureFusion fusion({16, 24, 32, 48}, rng);
  const Tensor fused = fusion.forward(levels);
  CHECK(fused.shape() == Shape{1, 32, 16, 24});

  // spatially constant levels stay spatially constant
  std::vector<Tensor> flat;
  for (const auto& l : levels) {
    std::vector<double> v(std::size_t(l.numel()));
    const auto plane = std::size_t(l.dim(2) * l.dim(3));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1 * double(i / plane);
    flat.push_back(Tensor::from(l.shape(), v));
  }
  const Tensor c = fusion.forward(flat);
  for (int ch = 0; ch < 32; ++ch) {
    for (int i = 1; i < 16 * 24; ++i) {
      CHECK(c.data()[ch * 384 + i] == doctest::Approx(c.data()[ch * 384]).epsilon(1e-12));
    }
  }
}

TEST_CASE("untrained refinement head is neutral") {
  Rng rng(29);
  CcdtConfig cfg;
  RefinementNet net(cfg, rng);
  net.set_training(false);
  const Tensor z = random({1, 1, 64, 96}, rng, 0.1, 1.0);
  const Tensor eps = random({1, 1, 64, 96}, rng, 0.8, 1.2);
  const Tensor fused = random({1, 32, 16, 24}, rng);
  const Tensor out = net.forward(z, eps, fused);
  CHECK(out.shape() == Shape{1, 1, 64, 96});
  for (double v : out.data()) CHECK(std::abs(v - 1.0) < 1e-15);
  CHECK(std::log1p(std::exp(neutral_logit())) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("full 336x448 resolution config validates") {
  CcdtConfig cfg;
  cfg.input_height = 336;
  cfg.input_width = 448;
  cfg.grid_downsample = {2, 2, 7, 1};  // stage sides 84x112, 42x56, 21x28, 11x14
  CHECK(cfg.stage(2).height == 21);
  CHECK(cfg.stage(3).height == 11);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("odd-sized input runs end to end") {
  Rng rng(30);
  CcdtConfig cfg;
  cfg.input_height = 40;
  cfg.input_width = 56;
  cfg.widths = {8, 8, 8, 8};
  cfg.heads = {1, 1, 1, 1};
  cfg.grid_downsample = {1, 1, 1, 1};
  RefinementNet net(cfg, rng);
  synth::FeaturePyramid pyr(rng, {4, 4, 4, 4}, 4);
  FeatureFusion fusion({4, 4, 4, 4}, rng);
  const Tensor guide = random({1, 1, 40, 56}, rng, 0, 1);
  const Tensor fused = fusion.forward(pyr.forward(guide));
  CHECK(fused.shape() == Shape{1, 32, 10, 14});
  const Tensor out = net.forward(random({1, 1, 40, 56}, rng, 0.1, 1), random({1, 1, 40, 56}, rng, 0.8, 1.2), fused);
  CHECK(out.shape() == Shape{1, 1, 40, 56});
}

TEST_CASE("network configuration validation") {
  CcdtConfig cfg;
  cfg.input_width = 16;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.grid_downsample[3] = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.heads[1] = 3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.input_width = 84;  // stage sides 16x21, 8x11, 4x6, 2x3
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.grid_downsample = {1, 1, 2, 1};
  CHECK(cfg.stage(3).width == 3);
  CHECK_NOTHROW(cfg.validate());
}
