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

#ifndef SPADE_SYNTH_ORACLE_HPP_
#define SPADE_SYNTH_ORACLE_HPP_

#include <cstdint>
#include <vector>

#include "spade/core/types.hpp"

namespace spade::synth {

/// Stand-in for a frozen relative-depth network. Produces z with
/// s_true z + t_true = bias / gt * (1 + noise).
struct OracleSpec {
  double s_true = 1.0;
  double t_true = 0.0;
  double bias_amplitude = 0.0;   // a in [0, 0.5]
  double bias_wavelength = 32.0; // px
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// 1 + a * value_noise; in [1 - a, 1 + a].
std::vector<double> bias_field(const OracleSpec& spec, int width, int height);

/// Affine-invariant inverse depth. Invalid ground-truth pixels stay invalid.
DepthRaster oracle_relative(const DepthRaster& gt, const OracleSpec& spec);

}  // namespace spade::synth

#endif  // SPADE_SYNTH_ORACLE_HPP_
