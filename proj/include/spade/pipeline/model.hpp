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

#ifndef SPADE_PIPELINE_MODEL_HPP_
#define SPADE_PIPELINE_MODEL_HPP_

#include <cstdint>

#include "spade/nn/blocks.hpp"
#include "spade/nn/refinement.hpp"
#include "spade/synth/pyramid.hpp"

namespace spade::pipeline {

/// Feature pyramid, fusion and refinement network trained together.
class SpadeModel : public nn::Module {
 public:
  SpadeModel(const nn::CcdtConfig& config, std::uint64_t seed);

  /// aligned, eps, guide: [N, 1, H, W]. Returns the scale correction
  /// [N, 1, H, W].
  nn::Tensor forward(const nn::Tensor& aligned, const nn::Tensor& eps, const nn::Tensor& guide);

  nn::RefinementNet& net() { return *net_; }
  const nn::CcdtConfig& config() const { return net_->config(); }

 private:
  synth::FeaturePyramid* pyramid_;
  nn::FeatureFusion* fusion_;
  nn::RefinementNet* net_;
};

}  // namespace spade::pipeline

#endif  // SPADE_PIPELINE_MODEL_HPP_
