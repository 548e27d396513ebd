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

#ifndef SPADE_NN_OPTIM_HPP_
#define SPADE_NN_OPTIM_HPP_

#include <vector>

#include "spade/nn/tensor.hpp"

namespace spade::nn {

struct AdamWOptions {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
};

/// Adam with decoupled weight decay. Parameters without a gradient are
/// skipped for that step (their moments are left untouched).
class AdamW {
 public:
  AdamW(std::vector<Tensor> params, AdamWOptions options = {});

  void step();
  void zero_grad();
  void set_lr(double lr) { options_.lr = lr; }
  double lr() const { return options_.lr; }
  long long steps() const { return t_; }

 private:
  std::vector<Tensor> params_;
  AdamWOptions options_;
  std::vector<std::vector<double>> m_, v_;
  long long t_ = 0;
};

}  // namespace spade::nn

#endif  // SPADE_NN_OPTIM_HPP_
