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

#ifndef SPADE_NN_OPS_INTERNAL_HPP_
#define SPADE_NN_OPS_INTERNAL_HPP_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "spade/core/error.hpp"
#include "spade/nn/tensor.hpp"

namespace spade::nn::detail {

using NodePtr = std::shared_ptr<Node>;

/// Builds a result tensor; attaches `backward` only when recording.
inline Tensor make_result(Shape shape, std::vector<double> data,
                          std::vector<NodePtr> inputs,
                          std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  bool record = false;
  if (grad_enabled()) {
    for (const auto& in : inputs) record = record || in->requires_grad;
  }
  if (record) {
    node->requires_grad = true;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

inline std::vector<std::int64_t> contiguous_strides(const Shape& shape) {
  std::vector<std::int64_t> s(shape.size(), 1);
  for (int d = static_cast<int>(shape.size()) - 2; d >= 0; --d) {
    s[d] = s[d + 1] * shape[d + 1];
  }
  return s;
}

/// Visits every element of `shape` in row-major order, passing the linear
/// index and the offsets under two stride sets.
template <class F>
void for_each_offset2(const Shape& shape, const std::vector<std::int64_t>& s1,
                      const std::vector<std::int64_t>& s2, F&& fn) {
  const int rank = static_cast<int>(shape.size());
  const std::int64_t total = numel(shape);
  if (total == 0) return;
  if (rank == 0) {
    fn(0, 0, 0);
    return;
  }
  std::vector<std::int64_t> idx(rank, 0);
  std::int64_t o1 = 0, o2 = 0, i = 0;
  const std::int64_t inner = shape[rank - 1];
  const std::int64_t i1 = s1[rank - 1], i2 = s2[rank - 1];
  while (i < total) {
    for (std::int64_t k = 0; k < inner; ++k) fn(i++, o1 + k * i1, o2 + k * i2);
    int d = rank - 2;
    for (; d >= 0; --d) {
      ++idx[d];
      o1 += s1[d];
      o2 += s2[d];
      if (idx[d] < shape[d]) break;
      o1 -= s1[d] * shape[d];
      o2 -= s2[d] * shape[d];
      idx[d] = 0;
    }
    if (d < 0) break;
  }
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace spade::nn::detail

#endif  // SPADE_NN_OPS_INTERNAL_HPP_
