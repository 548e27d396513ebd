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

#include "spade/pipeline/model.hpp"

#include <vector>

#include "spade/core/rng.hpp"

namespace spade::pipeline {

SpadeModel::SpadeModel(const nn::CcdtConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  pyramid_ = register_module("pyramid", std::make_unique<synth::FeaturePyramid>(rng));
  const auto& ch = pyramid_->channels();
  fusion_ = register_module(
      "fusion", std::make_unique<nn::FeatureFusion>(std::vector<int>(ch.begin(), ch.end()), rng,
                                                    config.fused_channels));
  net_ = register_module("refine", std::make_unique<nn::RefinementNet>(config, rng));
}

nn::Tensor SpadeModel::forward(const nn::Tensor& aligned, const nn::Tensor& eps,
                               const nn::Tensor& guide) {
  const nn::Tensor fused = fusion_->forward(pyramid_->forward(guide));
  return net_->forward(aligned, eps, fused);
}

}  // namespace spade::pipeline
