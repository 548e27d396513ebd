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

#ifndef SPADE_NN_GRADCHECK_HPP_
#define SPADE_NN_GRADCHECK_HPP_

#include <functional>
#include <string>
#include <vector>

#include "spade/core/rng.hpp"
#include "spade/nn/module.hpp"

namespace spade::nn {

struct GradCheckResult {
  double max_rel_error = 0;  // worst over all checked tensors
  std::string worst;         // name of the worst tensor
  std::size_t elements = 0;  // scalar entries perturbed
};

/// Central finite differences of L = sum(r * fn()) with a fixed random
/// projection r, against the reverse sweep. Per tensor the error is
/// max|analytic - numeric| / max(max|analytic|, max|numeric|, floor) with
/// floor = max(1e-8, 1e-3 * largest analytic entry over all of `wrt`).
/// Every tensor in `wrt` is perturbed in place and restored.
GradCheckResult gradcheck(const std::function<Tensor()>& fn, const std::vector<NamedTensor>& wrt,
                          Rng& rng, double step = 1e-6);

}  // namespace spade::nn

#endif  // SPADE_NN_GRADCHECK_HPP_
