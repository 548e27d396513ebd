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

#include "spade/pipeline/gradcheck_suite.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>

#include "spade/core/rng.hpp"
#include "spade/loss/loss.hpp"
#include "spade/nn/blocks.hpp"
#include "spade/nn/gradcheck.hpp"

namespace spade::pipeline {
namespace {

using nn::NamedTensor;
using nn::Shape;
using nn::Tensor;

Tensor random(const Shape& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(static_cast<std::size_t>(nn::numel(shape)));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor::from(shape, std::move(v), true);
}

// Keeps values clear of the kinks of relu/abs at zero.
Tensor random_nonzero(const Shape& shape, Rng& rng) {
  Tensor t = random(shape, rng);
  for (double& x : t.mutable_data()) {
    if (std::abs(x) < 0.05) x += x < 0 ? -0.1 : 0.1;
  }
  return t;
}

void randomize(nn::Module& m, Rng& rng, double amplitude) {
  for (auto& [name, t] : m.named_parameters()) {
    Tensor p = t;
    for (double& x : p.mutable_data()) x += rng.uniform(-amplitude, amplitude);
  }
}

std::vector<NamedTensor> with_params(std::vector<NamedTensor> inputs, const nn::Module& m) {
  for (auto& p : m.named_parameters()) inputs.push_back(p);
  return inputs;
}

// y = x^2 with a backward rule that is 10% too large.
Tensor faulty_square(const Tensor& x) {
  auto node = std::make_shared<nn::Node>();
  node->shape = x.shape();
  node->data = x.data();
  for (double& v : node->data) v *= v;
  if (nn::grad_enabled() && x.requires_grad()) {
    node->requires_grad = true;
    node->inputs = {x.node()};
    node->backward = [](nn::Node& self) {
      auto& in = *self.inputs[0];
      auto& g = in.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2.2 * in.data[i] * self.grad[i];
    };
  }
  return Tensor(node);
}

struct Case {
  std::string family;
  std::string shape;
  std::function<Tensor()> fn;
  std::vector<NamedTensor> wrt;
  std::shared_ptr<nn::Module> owner;  // keeps modules alive
};

std::string shape_text(std::initializer_list<Shape> shapes) {
  std::string s;
  for (const auto& sh : shapes) {
    if (!s.empty()) s += " ";
    s += nn::to_string(sh);
  }
  return s;
}

std::vector<Case> build_cases(const GradSuiteOptions& o, Rng& rng) {
  std::vector<Case> cases;
  const int reps = o.shapes_per_family;

  // conv: (N, Cin, H, W, Cout, k, stride, pad, groups)
  const int conv_cfg[3][9] = {{1, 2, 5, 5, 3, 3, 1, 1, 1}, {2, 4, 6, 7, 4, 3, 2, 1, 2}, {1, 3, 4, 4, 2, 1, 1, 0, 1}};
  for (int s = 0; s < reps; ++s) {
    const auto* c = conv_cfg[s % 3];
    const Shape xs{c[0], c[1], c[2], c[3]}, ws{c[4], c[1] / c[8], c[5], c[5]};
    Tensor x = random(xs, rng), w = random(ws, rng), b = random({c[4]}, rng);
    const nn::Conv2dOptions opt{c[6], c[7], c[8]};
    cases.push_back({"conv", shape_text({xs, ws}), [=] { return nn::conv2d(x, w, b, opt); },
                     {{"x", x}, {"weight", w}, {"bias", b}}, nullptr});
  }

  for (int s = 0; s < reps; ++s) {
    if (s % 2 == 0) {
      const Shape xs{2 + s, 3, 3, 2 + s};
      Tensor x = random(xs, rng), g = random({3}, rng, 0.5, 1.5), b = random({3}, rng);
      Tensor rm = Tensor::zeros({3}), rv = Tensor::full({3}, 1.0);
      cases.push_back({"norm", "batch " + nn::to_string(xs),
                       [=]() mutable { return nn::batch_norm(x, g, b, rm, rv, true); },
                       {{"x", x}, {"gamma", g}, {"beta", b}}, nullptr});
    } else {
      const Shape xs{2, 3 + s, 5};
      Tensor x = random(xs, rng), g = random({5}, rng, 0.5, 1.5), b = random({5}, rng);
      cases.push_back({"norm", "layer " + nn::to_string(xs), [=] { return nn::layer_norm(x, g, b); },
                       {{"x", x}, {"gamma", g}, {"beta", b}}, nullptr});
    }
  }

  const Shape act_shapes[3] = {{3, 4}, {2, 3, 5}, {1, 2, 3, 3}};
  for (int s = 0; s < reps; ++s) {
    Tensor x = random_nonzero(act_shapes[s % 3], rng);
    cases.push_back({"activations", nn::to_string(x.shape()),
                     [=] {
                       return nn::concat({nn::relu(x), nn::gelu(x), nn::sigmoid(x), nn::tanh(x),
                                          nn::softplus(x), nn::softmax(x), nn::exp(x),
                                          nn::abs(x), nn::sqrt(nn::add_scalar(nn::square(x), 0.5)),
                                          nn::log(nn::add_scalar(nn::square(x), 0.5))},
                                         0);
                     },
                     {{"x", x}}, nullptr});
  }

  const Shape pool_shapes[3] = {{1, 2, 4, 4}, {2, 1, 6, 4}, {1, 3, 4, 6}};
  for (int s = 0; s < reps; ++s) {
    Tensor x = random(pool_shapes[s % 3], rng);
    cases.push_back({"pool_resize", nn::to_string(x.shape()),
                     [=] {
                       const auto h = x.dim(2), w = x.dim(3);
                       return nn::concat({nn::reshape(nn::avg_pool2d(x, 2), {-1}),
                                          nn::reshape(nn::max_pool2d(x, 2), {-1}),
                                          nn::reshape(nn::upsample2x(x), {-1}),
                                          nn::reshape(nn::resize_bilinear(x, h + 1, w - 1), {-1})},
                                         0);
                     },
                     {{"x", x}}, nullptr});
  }

  const int bs_cfg[3][5] = {{1, 2, 4, 5, 6}, {2, 3, 5, 5, 4}, {1, 1, 6, 3, 8}};  // N C H W L
  for (int s = 0; s < reps; ++s) {
    const auto* c = bs_cfg[s % 3];
    Tensor x = random({c[0], c[1], c[2], c[3]}, rng);
    std::vector<double> loc;
    for (int i = 0; i < c[0] * c[4]; ++i) {
      for (int a = 0; a < 2; ++a) {
        const double extent = a == 0 ? c[2] - 1 : c[3] - 1;
        double v = rng.uniform(0.05, extent - 0.05);
        if (std::abs(v - std::round(v)) < 0.02) v += 0.05;
        loc.push_back(v);
      }
    }
    Tensor l = Tensor::from({c[0], c[4], 2}, std::move(loc), true);
    cases.push_back({"bilinear_sample", shape_text({x.shape(), l.shape()}),
                     [=] { return nn::bilinear_sample(x, l); }, {{"x", x}, {"loc", l}}, nullptr});
  }

  const Shape lin_shapes[3] = {{3, 4}, {2, 3, 5}, {1, 6}};
  for (int s = 0; s < reps; ++s) {
    const Shape xs = lin_shapes[s % 3];
    const auto in = xs.back();
    Tensor x = random(xs, rng), w = random({in, 3}, rng), b = random({3}, rng);
    Tensor y = random({3, 4}, rng);
    cases.push_back({"linear_matmul", nn::to_string(xs),
                     [=] {
                       const Tensor lin = nn::linear(x, w, b);
                       return nn::concat({nn::reshape(lin, {-1}),
                                          nn::reshape(nn::matmul(nn::reshape(lin, {-1, 3}), y), {-1})},
                                         0);
                     },
                     {{"x", x}, {"weight", w}, {"bias", b}, {"y", y}}, nullptr});
  }

  const int cbam_cfg[3][4] = {{1, 4, 4, 4}, {2, 6, 3, 5}, {1, 8, 5, 3}};
  for (int s = 0; s < reps; ++s) {
    const auto* c = cbam_cfg[s % 3];
    auto m = std::make_shared<nn::Cbam>(c[1], rng, 2);
    randomize(*m, rng, 0.2);
    Tensor x = random({c[0], c[1], c[2], c[3]}, rng);
    cases.push_back({"cbam", nn::to_string(x.shape()), [m, x] { return m->forward(x); },
                     with_params({{"x", x}}, *m), m});
  }

  // deformable attention: (C, heads, H, W, grid)
  const int da_cfg[3][5] = {{4, 1, 4, 4, 2}, {6, 2, 4, 6, 2}, {4, 2, 3, 3, 1}};
  for (int s = 0; s < reps; ++s) {
    const auto* c = da_cfg[s % 3];
    nn::DeformAttnConfig cfg;
    cfg.channels = c[0];
    cfg.heads = c[1];
    cfg.height = c[2];
    cfg.width = c[3];
    cfg.grid_downsample = c[4];
    cfg.offset_range = 1.5;
    cfg.offset_kernel = 3;
    auto m = std::make_shared<nn::DeformableAttention>(cfg, rng);
    // Move off the zero-offset, zero-bias start so both paths carry signal.
    randomize(*m, rng, 0.3);
    Tensor x = random({2, c[2] * c[3], c[0]}, rng);
    cases.push_back({"deformable_attention", nn::to_string(x.shape()) + " heads " + std::to_string(c[1]),
                     [m, x] { return m->forward(x); }, with_params({{"x", x}}, *m), m});
  }

  const int tb_cfg[3][4] = {{4, 1, 4, 4}, {4, 2, 2, 4}, {6, 3, 4, 2}};
  for (int s = 0; s < reps; ++s) {
    const auto* c = tb_cfg[s % 3];
    nn::DeformAttnConfig cfg;
    cfg.channels = c[0];
    cfg.heads = c[1];
    cfg.height = c[2];
    cfg.width = c[3];
    cfg.grid_downsample = 2;
    cfg.offset_kernel = 3;
    auto m = std::make_shared<nn::TransformerBlock>(cfg, rng);
    randomize(*m, rng, 0.2);
    Tensor x = random({1, c[0], c[2], c[3]}, rng);
    cases.push_back({"transformer_block", nn::to_string(x.shape()), [m, x] { return m->forward(x); },
                     with_params({{"x", x}}, *m), m});
  }

  const int rb_cfg[3][4] = {{2, 3, 4, 4}, {3, 4, 3, 3}, {2, 2, 5, 3}};
  for (int s = 0; s < reps; ++s) {
    const auto* c = rb_cfg[s % 3];
    auto m = std::make_shared<nn::ResCbamBlock>(c[1], rng);
    randomize(*m, rng, 0.1);
    Tensor x = random({c[0], c[1], c[2], c[3]}, rng);
    cases.push_back({"conv_cbam_block", nn::to_string(x.shape()), [m, x] { return m->forward(x); },
                     with_params({{"x", x}}, *m), m});
  }

  const int dec_cfg[3][5] = {{1, 3, 4, 4, 4}, {2, 2, 4, 6, 3}, {1, 5, 6, 2, 2}};  // N Cskip H W C
  for (int s = 0; s < reps; ++s) {
    const auto* c = dec_cfg[s % 3];
    auto m = std::make_shared<nn::DptDecoderBlock>(c[1], c[4], rng);
    randomize(*m, rng, 0.1);
    Tensor skip = random({c[0], c[1], c[2], c[3]}, rng);
    Tensor deep = random({c[0], c[4], c[2] / 2, c[3] / 2}, rng);
    cases.push_back({"decoder_block", shape_text({skip.shape(), deep.shape()}),
                     [m, skip, deep] { return m->forward(skip, deep); },
                     with_params({{"skip", skip}, {"deeper", deep}}, *m), m});
  }

  for (int s = 0; s < reps; ++s) {
    const std::vector<int> ch = s == 0 ? std::vector<int>{2, 3, 3, 4} : s == 1 ? std::vector<int>{3, 2, 2, 2}
                                                                                : std::vector<int>{2, 2, 3, 3};
    auto m = std::make_shared<nn::FeatureFusion>(ch, rng, 3);
    randomize(*m, rng, 0.1);
    const std::int64_t h = 8 + 4 * (s % 2), w = 8;
    std::vector<Tensor> feats;
    std::vector<NamedTensor> wrt;
    for (int l = 0; l < 4; ++l) {
      feats.push_back(random({1, ch[static_cast<std::size_t>(l)], h >> l, w >> l}, rng));
      wrt.emplace_back("level" + std::to_string(l), feats.back());
    }
    cases.push_back({"feature_fusion", nn::to_string(feats[0].shape()),
                     [m, feats] { return m->forward(feats); }, with_params(wrt, *m), m});
  }

  const Shape loss_shapes[3] = {{1, 1, 6, 7}, {2, 1, 8, 8}, {1, 1, 9, 5}};
  for (const char* which : {"loss_rmse", "loss_silog", "loss_grad"}) {
    for (int s = 0; s < reps; ++s) {
      const Shape sh = loss_shapes[s % 3];
      Tensor pred = random(sh, rng, 0.3, 1.5);
      Tensor target = random(sh, rng, 0.3, 1.5);
      std::vector<double> mask(static_cast<std::size_t>(nn::numel(sh)));
      for (double& m : mask) m = rng.uniform() < 0.8 ? 1.0 : 0.0;
      mask[0] = 1.0;
      Tensor mk = Tensor::from(sh, std::move(mask));
      const std::string w = which;
      cases.push_back({w, nn::to_string(sh),
                       [=] {
                         if (w == "loss_rmse") return loss::loss_rmse(pred, target, mk);
                         if (w == "loss_silog") return loss::loss_silog(pred, target, mk);
                         return loss::loss_grad(pred, target, mk);
                       },
                       {{"pred", pred}}, nullptr});
    }
  }

  if (o.include_faulty) {
    Tensor x = random_nonzero({3, 3}, rng);
    cases.push_back({"faulty_fixture", nn::to_string(x.shape()), [x] { return faulty_square(x); },
                     {{"x", x}}, nullptr});
  }
  return cases;
}

}  // namespace

bool GradSuiteReport::pass() const {
  for (const auto& c : cases) {
    if (!c.pass) return false;
  }
  return !cases.empty();
}

std::vector<GradCase> GradSuiteReport::worst_per_family() const {
  std::vector<GradCase> out;
  std::map<std::string, std::size_t> at;
  for (const auto& c : cases) {
    auto it = at.find(c.family);
    if (it == at.end()) {
      at[c.family] = out.size();
      out.push_back(c);
    } else if (c.max_rel_error > out[it->second].max_rel_error) {
      out[it->second] = c;
    }
  }
  return out;
}

GradSuiteReport run_gradcheck_suite(const GradSuiteOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(options.seed);
  GradSuiteReport report;
  report.tolerance = options.tolerance;
  for (auto& c : build_cases(options, rng)) {
    const auto r = nn::gradcheck(c.fn, c.wrt, rng, options.step);
    std::vector<std::string> names;
    for (const auto& [name, t] : c.wrt) names.push_back(name);
    report.cases.push_back({c.family, c.shape, r.max_rel_error, r.worst, r.elements,
                            r.max_rel_error <= options.tolerance, std::move(names)});
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

json to_json(const GradSuiteReport& r) {
  json cases = json::array();
  for (const auto& c : r.cases) {
    cases.push_back({{"family", c.family},
                     {"shape", c.shape},
                     {"max_rel_error", c.max_rel_error},
                     {"worst_tensor", c.worst},
                     {"elements", c.elements},
                     {"tensors", c.tensors},
                     {"pass", c.pass}});
  }
  json families = json::array();
  for (const auto& c : r.worst_per_family()) {
    families.push_back({{"family", c.family}, {"max_rel_error", c.max_rel_error}, {"pass", c.pass}});
  }
  return {{"tolerance", r.tolerance}, {"pass", r.pass()}, {"families", families}, {"cases", cases}};
}

}  // namespace spade::pipeline
