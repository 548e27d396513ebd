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

#ifndef SPADE_PIPELINE_GRADCHECK_SUITE_HPP_
#define SPADE_PIPELINE_GRADCHECK_SUITE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "spade/pipeline/config.hpp"

namespace spade::pipeline {

struct GradCase {
  std::string family;
  std::string shape;
  double max_rel_error = 0;
  std::string worst;
  std::size_t elements = 0;
  bool pass = false;
  std::vector<std::string> tensors;  // everything perturbed
};

struct GradSuiteReport {
  std::vector<GradCase> cases;
  double tolerance = 1e-4;
  double seconds = 0;
  bool pass() const;
  /// Worst case per family, in suite order.
  std::vector<GradCase> worst_per_family() const;
};

struct GradSuiteOptions {
  std::uint64_t seed = 11;
  double step = 1e-6;
  double tolerance = 1e-4;
  int shapes_per_family = 3;
  /// Adds a deliberately wrong backward rule that must be reported.
  bool include_faulty = false;
};

/// Finite-difference checks over every layer family: conv, norm,
/// activations, pooling/resize, bilinear sample, CBAM, deformable
/// attention (offsets and bias table included), transformer block, decoder
/// block, feature fusion, and the three losses.
GradSuiteReport run_gradcheck_suite(const GradSuiteOptions& options = {});

json to_json(const GradSuiteReport& report);

}  // namespace spade::pipeline

#endif  // SPADE_PIPELINE_GRADCHECK_SUITE_HPP_
