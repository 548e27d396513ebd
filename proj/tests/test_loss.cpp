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

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spade/core/error.hpp"
#include "spade/core/rng.hpp"
#include "spade/loss/loss.hpp"
#include "spade/loss/metrics.hpp"
#include "spade/nn/ops.hpp"

using namespace spade;
using namespace spade::loss;
using nn::Tensor;

namespace {

struct Pair {
  std::vector<double> p, t, m;
};

Pair random_pair(int n, Rng& rng, double hole = 0.2) {
  Pair x;
  for (int i = 0; i < n; ++i) {
    x.p.push_back(rng.uniform(0.1, 1.5));
    x.t.push_back(rng.uniform(0.1, 1.5));
    x.m.push_back(rng.uniform() < hole ? 0.0 : 1.0);
  }
  x.m[0] = 1.0;
  return x;
}

Tensor t4(const std::vector<double>& v, int n, int h, int w) { return Tensor::from({n, 1, h, w}, v); }

DepthRaster metric(const std::vector<double>& v, int w, int h) {
  return DepthRaster::dense(w, h, DepthSpace::kMetric, v);
}

}  // namespace

TEST_CASE("rmse loss") {
  const Tensor one = Tensor::from({1, 2}, {1, 1});
  CHECK(loss_rmse(Tensor::from({1, 2}, {1, 1}), Tensor::from({1, 2}, {0, 2}), one).item() == 1.0);
  Rng rng(31);
  auto x = random_pair(64, rng);
  CHECK(std::abs(loss_rmse(t4(x.p, 1, 8, 8), t4(x.t, 1, 8, 8), t4(x.m, 1, 8, 8)).item() -
                 oracle::rmse_loss(x.p, x.t, x.m)) <= 1e-12);
  CHECK(loss_rmse(t4(x.p, 1, 8, 8), t4(x.p, 1, 8, 8), t4(x.m, 1, 8, 8)).item() == 0.0);
  CHECK_THROWS_AS(loss_rmse(one, one, Tensor::zeros({1, 2})), DomainError);
  CHECK_THROWS_AS(loss_rmse(one, Tensor::zeros({2, 1}), one), ShapeError);
}

TEST_CASE("silog loss") {
  Rng rng(32);
  auto x = random_pair(64, rng);
  const Tensor m = t4(x.m, 1, 8, 8);
  CHECK(loss_silog(t4(x.t, 1, 8, 8), t4(x.t, 1, 8, 8), m).item() == 0.0);
  std::vector<double> scaled(x.t);
  for (double& v : scaled) v *= std::exp(1.0);
  CHECK(std::abs(loss_silog(t4(scaled, 1, 8, 8), t4(x.t, 1, 8, 8), m).item() - 10 * std::sqrt(0.15)) <= 1e-9);
  CHECK(std::abs(loss_silog(t4(x.p, 1, 8, 8), t4(x.t, 1, 8, 8), m).item() -
                 oracle::silog_loss(x.p, x.t, x.m)) <= 1e-12);
  std::vector<double> bad(x.p);
  bad[3] = -0.1;
  CHECK_THROWS_AS(loss_silog(t4(bad, 1, 8, 8), t4(x.t, 1, 8, 8), m), DomainError);
}

TEST_CASE("gradient loss") {
  Rng rng(33);
  auto x = random_pair(64, rng);
  const Tensor m = t4(x.m, 1, 8, 8);
  CHECK(loss_grad(t4(x.p, 1, 8, 8), t4(x.p, 1, 8, 8), m).item() == 0.0);
  std::vector<double> shifted(x.p);
  for (double& v : shifted) v += 0.3;
  CHECK(loss_grad(t4(x.p, 1, 8, 8), t4(shifted, 1, 8, 8), m).item() < 1e-14);
  CHECK(std::abs(loss_grad(t4(x.p, 1, 8, 8), t4(x.t, 1, 8, 8), m).item() -
                 oracle::grad_loss(x.p, x.t, x.m, 8, 8)) <= 1e-12);
  // 4x4 has room for two scales only
  auto y = random_pair(16, rng, 0.0);
  CHECK(std::abs(loss_grad(t4(y.p, 1, 4, 4), t4(y.t, 1, 4, 4), t4(y.m, 1, 4, 4)).item() -
                 oracle::grad_loss(y.p, y.t, y.m, 4, 4)) <= 1e-12);
}

TEST_CASE("total loss is the weighted sum of its parts") {
  Rng rng(34);
  auto x = random_pair(2 * 64, rng);
  const Tensor p = t4(x.p, 2, 8, 8), t = t4(x.t, 2, 8, 8), m = t4(x.m, 2, 8, 8);
  const auto r = loss_total(p, t, m);
  CHECK(std::abs(r.total - (r.rmse_loss + r.silog_loss + 0.5 * r.grad_loss)) <= 1e-12);
  // batch losses are per-frame means
  const std::vector<double> p0(x.p.begin(), x.p.begin() + 64), p1(x.p.begin() + 64, x.p.end());
  const std::vector<double> q0(x.t.begin(), x.t.begin() + 64), q1(x.t.begin() + 64, x.t.end());
  const std::vector<double> m0(x.m.begin(), x.m.begin() + 64), m1(x.m.begin() + 64, x.m.end());
  CHECK(std::abs(r.rmse_loss - 0.5 * (oracle::rmse_loss(p0, q0, m0) + oracle::rmse_loss(p1, q1, m1))) <= 1e-12);
  CHECK(std::abs(r.silog_loss - 0.5 * (oracle::silog_loss(p0, q0, m0) + oracle::silog_loss(p1, q1, m1))) <= 1e-12);
  const auto z = loss_total(p, p, m);
  CHECK(z.total == 0.0);
  const LossWeights w;
  CHECK(w.rmse == 1.0);
  CHECK(w.silog == 1.0);
  CHECK(w.grad == 0.5);
}

TEST_CASE("metrics") {
  Rng rng(35);
  std::vector<double> g(48), p(48);
  for (int i = 0; i < 48; ++i) {
    g[i] = rng.uniform(0.5, 14.0);
    p[i] = rng.uniform(0.5, 14.0);
  }
  const auto m = frame_metrics(metric(p, 8, 6), metric(g, 8, 6), 10.0);
  REQUIRE(m);
  const auto ref = oracle::metrics(p, g, 10.0);
  CHECK(std::abs(m->mae - ref.mae) <= 1e-12);
  CHECK(std::abs(m->rmse - ref.rmse) <= 1e-12);
  CHECK(std::abs(m->absrel - ref.absrel) <= 1e-12);
  CHECK(std::abs(m->silog - ref.silog) <= 1e-12);
  CHECK(std::abs(m->imae - ref.imae) <= 1e-12);

  const auto same = frame_metrics(metric(g, 8, 6), metric(g, 8, 6), 20.0);
  CHECK(same->mae == 0.0);
  CHECK(same->silog == 0.0);
  for (double c : {0.5, 2.0, 10.0}) {
    std::vector<double> cg(g);
    for (double& v : cg) v *= c;
    CHECK(frame_metrics(metric(cg, 8, 6), metric(g, 8, 6), 20.0)->silog <= 1e-9);
  }
  // nothing under the cap
  CHECK_FALSE(frame_metrics(metric(p, 8, 6), metric(std::vector<double>(48, 50.0), 8, 6), 10.0));
}

TEST_CASE("metric aggregation skips empty frames") {
  MetricReport a;
  a.mae = 1;
  a.frame_count = 1;
  MetricReport b;
  b.mae = 3;
  b.frame_count = 1;
  const auto r = aggregate({a, std::nullopt, b}, 10.0);
  CHECK(r.mae == 2.0);
  CHECK(r.frame_count == 2);
  CHECK(r.skipped_frames == 1);
}
