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

#ifndef SPADE_NN_MODULE_HPP_
#define SPADE_NN_MODULE_HPP_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "spade/core/rng.hpp"
#include "spade/nn/ops.hpp"
#include "spade/nn/tensor.hpp"

namespace spade::nn {

using NamedTensor = std::pair<std::string, Tensor>;

/// Owner of named parameters, buffers and child modules. Names are dotted
/// paths ("stage1.conv.weight") and are stable across runs.
class Module {
 public:
  Module() = default;
  virtual ~Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  std::vector<NamedTensor> named_parameters() const;
  std::vector<NamedTensor> named_buffers() const;
  std::vector<Tensor> parameters() const;
  std::size_t parameter_count() const;

  void set_training(bool on);
  bool training() const { return training_; }
  void zero_grad();

 protected:
  Tensor register_parameter(std::string name, Tensor t);
  Tensor register_buffer(std::string name, Tensor t);
  template <class M>
  M* register_module(std::string name, std::unique_ptr<M> module) {
    M* raw = module.get();
    children_.emplace_back(std::move(name), std::move(module));
    return raw;
  }

 private:
  void collect(const std::string& prefix, bool buffers, std::vector<NamedTensor>& out) const;

  std::vector<NamedTensor> params_;
  std::vector<NamedTensor> buffers_;
  std::vector<std::pair<std::string, std::unique_ptr<Module>>> children_;
  bool training_ = true;
};

/// Kaiming-uniform weights (bound sqrt(6 / fan_in)), zero bias.
class Conv2d : public Module {
 public:
  Conv2d(int in, int out, int kernel, Rng& rng, Conv2dOptions options = {},
         bool bias = true);
  Tensor forward(const Tensor& x) const;
  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  Tensor weight_;
  Tensor bias_;
  Conv2dOptions options_;
};

class BatchNorm2d : public Module {
 public:
  explicit BatchNorm2d(int channels);
  Tensor forward(const Tensor& x);

 private:
  Tensor gamma_, beta_, running_mean_, running_var_;
};

/// y = x W + b with W stored [in, out]; Xavier-uniform init.
class Linear : public Module {
 public:
  Linear(int in, int out, Rng& rng);
  Tensor forward(const Tensor& x) const;
  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  Tensor weight_;
  Tensor bias_;
};

class LayerNorm : public Module {
 public:
  explicit LayerNorm(int dim);
  Tensor forward(const Tensor& x) const;

 private:
  Tensor gamma_, beta_;
};

/// [N, C, H, W] <-> [N, H*W, C].
Tensor to_tokens(const Tensor& image);
Tensor from_tokens(const Tensor& tokens, std::int64_t height, std::int64_t width);

}  // namespace spade::nn

#endif  // SPADE_NN_MODULE_HPP_
