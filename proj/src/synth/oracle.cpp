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

#include "spade/synth/oracle.hpp"

#include "spade/core/error.hpp"
#include "spade/core/rng.hpp"
#include "spade/synth/scene.hpp"

namespace spade::synth {

void OracleSpec::validate() const {
  if (!(s_true > 0)) throw ConfigError("oracle: s_true must be > 0");
  if (!(bias_amplitude >= 0 && bias_amplitude <= 0.5)) {
    throw ConfigError("oracle: bias amplitude must be in [0, 0.5]");
  }
  if (!(bias_wavelength > 0)) throw ConfigError("oracle: bias wavelength must be > 0");
  if (!(noise_sigma >= 0)) throw ConfigError("oracle: noise sigma must be >= 0");
}

std::vector<double> bias_field(const OracleSpec& spec, int width, int height) {
  std::vector<double> out(static_cast<std::size_t>(width) * height, 1.0);
  if (spec.bias_amplitude == 0.0) return out;
  const ValueNoise noise(Rng(spec.seed).fork(), spec.bias_wavelength, width, height);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      out[static_cast<std::size_t>(v) * width + u] = 1.0 + spec.bias_amplitude * noise(u, v);
    }
  }
  return out;
}

DepthRaster oracle_relative(const DepthRaster& gt, const OracleSpec& spec) {
  spec.validate();
  if (gt.space() != DepthSpace::kMetric) throw DomainError("oracle: ground truth must be metric");
  const auto bias = bias_field(spec, gt.width(), gt.height());
  Rng rng(spec.seed ^ 0x5bd1e995ULL);
  std::vector<double> z(gt.size(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double n = spec.noise_sigma > 0 ? spec.noise_sigma * rng.normal() : 0.0;
    if (!gt.mask()[i]) continue;
    const double v = bias[i] / gt.values()[i] * (1.0 + n);
    z[i] = (v - spec.t_true) / spec.s_true;
  }
  return DepthRaster(gt.width(), gt.height(), DepthSpace::kAffine, std::move(z), gt.mask());
}

}  // namespace spade::synth
