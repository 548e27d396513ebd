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

#include "spade/nn/module.hpp"

#include <cmath>

namespace spade::nn {

Tensor Module::register_parameter(std::string name, Tensor t) {
  t.set_requires_grad(true);
  params_.emplace_back(std::move(name), t);
  return t;
}

Tensor Module::register_buffer(std::string name, Tensor t) {
  buffers_.emplace_back(std::move(name), t);
  return t;
}

void Module::collect(const std::string& prefix, bool buffers,
                     std::vector<NamedTensor>& out) const {
  for (const auto& [name, t] : buffers ? buffers_ : params_) out.emplace_back(prefix + name, t);
  for (const auto& [name, child] : children_) child->collect(prefix + name + ".", buffers, out);
}

std::vector<NamedTensor> Module::named_parameters() const {
  std::vector<NamedTensor> out;
  collect("", false, out);
  return out;
}

std::vector<NamedTensor> Module::named_buffers() const {
  std::vector<NamedTensor> out;
  collect("", true, out);
  return out;
}

std::vector<Tensor> Module::parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named_parameters()) out.push_back(t);
  return out;
}

std::size_t Module::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : parameters()) n += static_cast<std::size_t>(t.numel());
  return n;
}

void Module::set_training(bool on) {
  training_ = on;
  for (auto& [name, child] : children_) child->set_training(on);
}

void Module::zero_grad() {
  for (auto& t : parameters()) t.zero_grad();
}

Conv2d::Conv2d(int in, int out, int kernel, Rng& rng, Conv2dOptions options, bool bias)
    : options_(options) {
  const int fan_in = in / options.groups * kernel * kernel;
  const double bound = std::sqrt(6.0 / fan_in);
  std::vector<double> w(static_cast<std::size_t>(out) * (in / options.groups) * kernel * kernel);
  for (double& v : w) v = rng.uniform(-bound, bound);
  weight_ = register_parameter(
      "weight", Tensor::from({out, in / options.groups, kernel, kernel}, std::move(w)));
  if (bias) bias_ = register_parameter("bias", Tensor::zeros({out}));
}

Tensor Conv2d::forward(const Tensor& x) const { return conv2d(x, weight_, bias_, options_); }

BatchNorm2d::BatchNorm2d(int channels) {
  gamma_ = register_parameter("gamma", Tensor::full({channels}, 1.0));
  beta_ = register_parameter("beta", Tensor::zeros({channels}));
  running_mean_ = register_buffer("running_mean", Tensor::zeros({channels}));
  running_var_ = register_buffer("running_var", Tensor::full({channels}, 1.0));
}

Tensor BatchNorm2d::forward(const Tensor& x) {
  return batch_norm(x, gamma_, beta_, running_mean_, running_var_, training());
}

Linear::Linear(int in, int out, Rng& rng) {
  const double bound = std::sqrt(6.0 / (in + out));
  std::vector<double> w(static_cast<std::size_t>(in) * out);
  for (double& v : w) v = rng.uniform(-bound, bound);
  weight_ = register_parameter("weight", Tensor::from({in, out}, std::move(w)));
  bias_ = register_parameter("bias", Tensor::zeros({out}));
}

Tensor Linear::forward(const Tensor& x) const { return linear(x, weight_, bias_); }

LayerNorm::LayerNorm(int dim) {
  gamma_ = register_parameter("gamma", Tensor::full({dim}, 1.0));
  beta_ = register_parameter("beta", Tensor::zeros({dim}));
}

Tensor LayerNorm::forward(const Tensor& x) const { return layer_norm(x, gamma_, beta_); }

Tensor to_tokens(const Tensor& image) {
  const auto n = image.dim(0), c = image.dim(1), h = image.dim(2), w = image.dim(3);
  return reshape(permute(image, {0, 2, 3, 1}), {n, h * w, c});
}

Tensor from_tokens(const Tensor& tokens, std::int64_t height, std::int64_t width) {
  const auto n = tokens.dim(0), c = tokens.dim(2);
  return permute(reshape(tokens, {n, height, width, c}), {0, 3, 1, 2});
}

}  // namespace spade::nn
