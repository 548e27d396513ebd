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

#ifndef SPADE_LOSS_LOSS_HPP_
#define SPADE_LOSS_LOSS_HPP_

#include <cstddef>

#include "spade/nn/tensor.hpp"

namespace spade::loss {

using nn::Tensor;

/// All losses take inverse-depth maps whose last two axes are (H, W).
/// `target` and `mask` are constants of the same shape; mask entries are
/// 0 or 1 and select pixels with valid ground truth. Batched inputs
/// [N, 1, H, W] are reduced per frame and averaged over frames.

Tensor loss_rmse(const Tensor& pred, const Tensor& target, const Tensor& mask);

struct SilogParams {
  double lambda = 0.85;
  double beta = 10.0;
};
/// Requires pred > 0 everywhere and target > 0 on the mask.
Tensor loss_silog(const Tensor& pred, const Tensor& target, const Tensor& mask,
                  SilogParams params = {});

/// Mean over scales of masked forward-difference magnitudes of the residual,
/// with 2x2 masked average pooling between scales. Scales smaller than 2x2
/// are dropped and the mean is taken over the remaining ones.
Tensor loss_grad(const Tensor& pred, const Tensor& target, const Tensor& mask, int scales = 3);

struct LossWeights {
  double rmse = 1.0;
  double silog = 1.0;
  double grad = 0.5;
};

struct LossTerms {
  Tensor rmse, silog, grad, total;
};
LossTerms loss_terms(const Tensor& pred, const Tensor& target, const Tensor& mask,
                     LossWeights weights = {});

struct LossReport {
  double rmse_loss = 0, silog_loss = 0, grad_loss = 0, total = 0;
  std::size_t valid_pixel_count = 0;
};
LossReport loss_total(const Tensor& pred, const Tensor& target, const Tensor& mask,
                      LossWeights weights = {});

}  // namespace spade::loss

#endif  // SPADE_LOSS_LOSS_HPP_
