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

#include <cmath>

#include "spade/core/error.hpp"
#include "spade/core/rng.hpp"
#include "spade/nn/checkpoint.hpp"
#include "spade/nn/gradcheck.hpp"
#include "spade/nn/module.hpp"
#include "spade/nn/ops.hpp"
#include "spade/nn/optim.hpp"

using namespace spade;
using namespace spade::nn;

namespace {

Tensor random(const Shape& shape, Rng& rng) {
  std::vector<double> v(std::size_t(numel(shape)));
  for (double& x : v) x = rng.uniform(-1, 1);
  return Tensor::from(shape, v);
}

class Tiny : public Module {
 public:
  explicit Tiny(Rng& rng) {
    conv = register_module("conv", std::make_unique<Conv2d>(2, 3, 3, rng, Conv2dOptions{1, 1, 1}));
    bn = register_module("bn", std::make_unique<BatchNorm2d>(3));
    fc = register_module("fc", std::make_unique<Linear>(3, 2, rng));
  }
  Tensor forward(const Tensor& x) { return fc->forward(reshape(mean_axes(relu(bn->forward(conv->forward(x))), {2, 3}), {x.dim(0), 3})); }
  Conv2d* conv;
  BatchNorm2d* bn;
  Linear* fc;
};

}  // namespace

TEST_CASE("identity convolution") {
  Rng rng(1);
  const Tensor x = random({2, 3, 5, 4}, rng);
  std::vector<double> w(3 * 3 * 9, 0.0);
  for (int c = 0; c < 3; ++c) w[(c * 3 + c) * 9 + 4] = 1.0;
  const Tensor y = conv2d(x, Tensor::from({3, 3, 3, 3}, w), Tensor::zeros({3}), {1, 1, 1});
  CHECK(y.data() == x.data());
  CHECK_THROWS_AS(conv2d(x, Tensor::zeros({3, 2, 3, 3}), Tensor()), ShapeError);
}

TEST_CASE("softmax rows sum to one") {
  Rng rng(2);
  const Tensor s = softmax(random({4, 7}, rng) * 30.0);
  for (int r = 0; r < 4; ++r) {
    double acc = 0;
    for (int c = 0; c < 7; ++c) acc += s.data()[r * 7 + c];
    CHECK(std::abs(acc - 1.0) < 1e-12);
  }
}

TEST_CASE("bilinear sampling at nodes and midpoints") {
  const Tensor x = Tensor::from({1, 1, 2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor loc = Tensor::from({1, 4, 2}, {0, 0, 1, 2, 0, 0.5, 0.5, 1.5});
  const Tensor y = bilinear_sample(x, loc);
  CHECK(y.data()[0] == 1.0);
  CHECK(y.data()[1] == 6.0);
  CHECK(y.data()[2] == 1.5);
  CHECK(y.data()[3] == doctest::Approx(4.0));
  // clamped outside the border
  const Tensor far = bilinear_sample(x, Tensor::from({1, 1, 2}, {-5, 10}));
  CHECK(far.data()[0] == 3.0);
}

TEST_CASE("pooling and resizing shapes") {
  Rng rng(3);
  const Tensor x = random({1, 2, 6, 8}, rng);
  CHECK(avg_pool2d(x, 2).shape() == Shape{1, 2, 3, 4});
  CHECK(max_pool2d(x, 2).shape() == Shape{1, 2, 3, 4});
  CHECK(upsample2x(x).shape() == Shape{1, 2, 12, 16});
  CHECK(resize_bilinear(x, 5, 3).shape() == Shape{1, 2, 5, 3});
  // a constant stays constant
  const Tensor c = Tensor::full({1, 1, 3, 3}, 2.5);
  const Tensor r = resize_bilinear(c, 7, 4);
  for (double v : r.data()) CHECK(v == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("gradients accumulate over shared uses") {
  Tensor a = Tensor::from({2}, {3, -1}, true);
  sum(a * a + a).backward();
  CHECK(a.grad() == std::vector<double>{7, -1});
  {
    NoGradGuard guard;
    const Tensor b = a * a;
    CHECK_FALSE(b.requires_grad());
  }
  CHECK(grad_enabled());
}

TEST_CASE("reshape infers one axis") {
  const Tensor x = Tensor::zeros({2, 3, 4});
  CHECK(reshape(x, {-1}).shape() == Shape{24});
  CHECK(reshape(x, {4, -1}).shape() == Shape{4, 6});
  CHECK_THROWS_AS(reshape(x, {5, -1}), ShapeError);
}

TEST_CASE("batch norm train and eval") {
  Rng rng(4);
  BatchNorm2d bn(2);
  const Tensor x = random({3, 2, 4, 4}, rng);
  const Tensor y = bn.forward(x);
  for (int c = 0; c < 2; ++c) {
    double m = 0, v = 0;
    for (int n = 0; n < 3; ++n) {
      for (int i = 0; i < 16; ++i) m += y.data()[(n * 2 + c) * 16 + i] / 48;
    }
    for (int n = 0; n < 3; ++n) {
      for (int i = 0; i < 16; ++i) v += std::pow(y.data()[(n * 2 + c) * 16 + i] - m, 2) / 48;
    }
    CHECK(std::abs(m) < 1e-12);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-3));
  }
  bn.set_training(false);
  const Tensor e = bn.forward(x);
  CHECK(e.shape() == x.shape());
  CHECK(e.data() != y.data());
}

TEST_CASE("module parameter names") {
  Rng rng(5);
  Tiny m(rng);
  std::vector<std::string> names;
  for (const auto& [n, t] : m.named_parameters()) names.push_back(n);
  CHECK(names == std::vector<std::string>{"conv.weight", "conv.bias", "bn.gamma", "bn.beta", "fc.weight",
                                          "fc.bias"});
  CHECK(m.named_buffers().size() == 2);
  CHECK(m.parameter_count() == 3 * 2 * 9 + 3 + 3 + 3 + 6 + 2);
}

TEST_CASE("checkpoint round trip") {
  Rng rng(6);
  Tiny a(rng), b(rng);
  a.forward(random({2, 2, 4, 4}, rng));  // moves running stats
  const auto bytes = encode_checkpoint(a, "{\"k\":1}");
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "SPW1");
  CHECK(decode_checkpoint(b, bytes) == "{\"k\":1}");
  for (std::size_t i = 0; i < a.named_parameters().size(); ++i) {
    CHECK(a.named_parameters()[i].second.data() == b.named_parameters()[i].second.data());
  }
  for (std::size_t i = 0; i < a.named_buffers().size(); ++i) {
    CHECK(a.named_buffers()[i].second.data() == b.named_buffers()[i].second.data());
  }
  CHECK(encode_checkpoint(b, "{\"k\":1}") == bytes);

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(b, bad), FormatError);
  auto cut = bytes;
  cut.resize(cut.size() - 8);
  CHECK_THROWS_AS(decode_checkpoint(b, cut), FormatError);
  Linear other(3, 2, rng);
  CHECK_THROWS_AS(decode_checkpoint(other, bytes), FormatError);
}

TEST_CASE("adamw first step") {
  Tensor w = Tensor::from({2}, {1.0, -2.0}, true);
  AdamW opt({w}, {0.1, 0.9, 0.999, 1e-8, 0.01});
  w.mutable_grad() = {0.5, -0.25};
  opt.step();
  // bias-corrected first step moves each weight by lr * sign(g) after decay
  CHECK(w.data()[0] == doctest::Approx(1.0 * (1 - 0.1 * 0.01) - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
  CHECK(w.data()[1] == doctest::Approx(-2.0 * (1 - 0.1 * 0.01) + 0.1 * 0.25 / (0.25 + 1e-8)).epsilon(1e-14));
  CHECK(opt.steps() == 1);
  opt.zero_grad();
  CHECK_FALSE(w.has_grad());
}

TEST_CASE("gradcheck accepts correct rules and flags small errors") {
  Rng rng(7);
  Tensor x = random({3, 4}, rng);
  const auto ok = gradcheck([&] { return gelu(x) * sigmoid(x); }, {{"x", x}}, rng);
  CHECK(ok.max_rel_error < 1e-6);
  CHECK(ok.elements == 12);
}
