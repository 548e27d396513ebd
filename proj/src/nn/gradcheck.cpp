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

#include "spade/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace spade::nn {

GradCheckResult gradcheck(const std::function<Tensor()>& fn, const std::vector<NamedTensor>& wrt,
                          Rng& rng, double step) {
  std::vector<double> proj;
  auto objective = [&](const Tensor& y) {
    if (proj.empty()) {
      proj.resize(y.data().size());
      for (double& r : proj) r = rng.uniform(-1.0, 1.0);
    }
    return sum(mul(y, Tensor::from(y.shape(), proj)));
  };

  for (auto [name, t] : wrt) {
    t.set_requires_grad(true);
    t.zero_grad();
  }
  objective(fn()).backward();
  std::vector<std::vector<double>> analytic;
  for (const auto& [name, t] : wrt) {
    analytic.push_back(t.has_grad() ? t.grad() : std::vector<double>(t.data().size(), 0.0));
  }

  // tensors whose gradient vanishes by construction are judged against the
  // gradient scale of the whole case
  double case_scale = 0;
  for (const auto& g : analytic) {
    for (double v : g) case_scale = std::max(case_scale, std::abs(v));
  }
  const double floor = std::max(1e-8, 1e-3 * case_scale);

  GradCheckResult out;
  NoGradGuard no_grad;
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    Tensor t = wrt[i].second;
    auto& data = t.mutable_data();
    double diff = 0, scale = floor;
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double saved = data[k];
      data[k] = saved + step;
      const double up = objective(fn()).item();
      data[k] = saved - step;
      const double down = objective(fn()).item();
      data[k] = saved;
      const double numeric = (up - down) / (2 * step);
      diff = std::max(diff, std::abs(numeric - analytic[i][k]));
      scale = std::max({scale, std::abs(numeric), std::abs(analytic[i][k])});
      ++out.elements;
    }
    const double rel = diff / scale;
    if (rel >= out.max_rel_error) {
      out.max_rel_error = rel;
      out.worst = wrt[i].first;
    }
  }
  for (auto [name, t] : wrt) t.zero_grad();
  return out;
}

}  // namespace spade::nn
