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

#ifndef SPADE_NN_OPS_HPP_
#define SPADE_NN_OPS_HPP_

#include <vector>

#include "spade/nn/tensor.hpp"

namespace spade::nn {

// Every op records a backward rule when grad mode is on and at least one
// input requires a gradient. Shape mismatches raise ShapeError naming both
// shapes.

// --- elementwise, binary. Operands must have equal rank; each dimension
// must match or be 1 on one side (broadcast).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double value);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return scale(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }
inline Tensor operator+(const Tensor& a, double s) { return add_scalar(a, s); }
inline Tensor operator-(const Tensor& a) { return scale(a, -1.0); }

// --- elementwise, unary
Tensor relu(const Tensor& x);
Tensor gelu(const Tensor& x);  // exact erf form
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor softplus(const Tensor& x);
Tensor exp(const Tensor& x);
/// Throws DomainError on non-positive input.
Tensor log(const Tensor& x);
/// Gradient at 0 is taken as 0.
Tensor sqrt(const Tensor& x);
Tensor abs(const Tensor& x);
Tensor square(const Tensor& x);

// --- shape
Tensor reshape(const Tensor& x, Shape shape);
Tensor permute(const Tensor& x, const std::vector<int>& order);
/// Slice [start, start + length) along `axis`.
Tensor narrow(const Tensor& x, int axis, std::int64_t start, std::int64_t length);
Tensor concat(const std::vector<Tensor>& parts, int axis);

// --- reductions
Tensor sum(const Tensor& x);   // shape [1]
Tensor mean(const Tensor& x);  // shape [1]
/// Reductions over `axes`, keeping them as size-1 dimensions.
Tensor sum_axes(const Tensor& x, const std::vector<int>& axes);
Tensor mean_axes(const Tensor& x, const std::vector<int>& axes);
Tensor max_axes(const Tensor& x, const std::vector<int>& axes);

// --- linear algebra
/// [B, M, K] x [B, K, N] -> [B, M, N]; a batch of 1 broadcasts. Rank-2
/// operands are accepted as a single batch.
Tensor matmul(const Tensor& a, const Tensor& b);
/// x[..., in] * w[in, out] + b[out]; `b` may be undefined.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);
/// Softmax over the last axis.
Tensor softmax(const Tensor& x);
/// Normalisation over the last axis with affine gamma/beta of that size.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps = 1e-5);

// --- image ops on [N, C, H, W]
struct Conv2dOptions {
  int stride = 1;
  int padding = 0;
  int groups = 1;
};
/// Weight [Cout, Cin / groups, kh, kw]; bias [Cout] or undefined. Zero
/// padding.
Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              const Conv2dOptions& options = {});

/// Per-channel batch normalisation. In training mode batch statistics are
/// used and the running buffers are updated in place (unbiased variance).
Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  Tensor& running_mean, Tensor& running_var, bool training,
                  double momentum = 0.1, double eps = 1e-5);

Tensor avg_pool2d(const Tensor& x, int kernel);
Tensor max_pool2d(const Tensor& x, int kernel);

/// Bilinear resize with half-pixel centres (align_corners = false).
Tensor resize_bilinear(const Tensor& x, std::int64_t out_h, std::int64_t out_w);
Tensor upsample2x(const Tensor& x);
/// Bilinear upsampling onto a map whose sides are 2n or 2n - 1 (the output
/// of a padded stride-2 layer on that map). Throws otherwise.
Tensor upsample_onto(const Tensor& x, std::int64_t out_h, std::int64_t out_w);

/// Samples x [Nx, C, H, W] at continuous (row, col) locations
/// loc [N, L, 2] with border clamping; Nx must be 1 or N. Returns
/// [N, C, L]. Differentiable in both x and loc.
Tensor bilinear_sample(const Tensor& x, const Tensor& loc);

}  // namespace spade::nn

#endif  // SPADE_NN_OPS_HPP_
