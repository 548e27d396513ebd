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
#include "spade/align/alignment.hpp"
#include "spade/core/rng.hpp"
#include "spade/sim/sensor.hpp"
#include "spade/synth/oracle.hpp"
#include "spade/synth/scene.hpp"

using namespace spade;
using align::AlignmentError;
using align::FitMode;

namespace {

std::vector<double> vec(std::initializer_list<double> l) { return l; }

// 1-row raster holding z, with one point per column.
std::pair<DepthRaster, SparsePointSet> strip(const std::vector<double>& z, const std::vector<double>& v) {
  std::vector<SparsePoint> pts;
  for (std::size_t i = 0; i < z.size(); ++i) pts.push_back({double(i), 0, 1.0 / v[i]});
  return {DepthRaster::dense(int(z.size()), 1, DepthSpace::kAffine, z), SparsePointSet(pts)};
}

}  // namespace

TEST_CASE("scale and shift fit") {
  auto z = vec({0.2, 0.4, 0.6});
  auto v = vec({0.5, 0.9, 1.3});
  const auto f = align::fit_scale_shift(z, v);
  CHECK(f.scale == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.shift == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(f.residual_rms < 1e-14);

  auto flat = vec({0.5, 0.5, 0.5});
  try {
    align::fit_scale_shift(flat, v);
    FAIL("no error");
  } catch (const AlignmentError& e) {
    CHECK(e.kind() == AlignmentError::Kind::kDegenerateDesign);
  }
  auto one = vec({0.5});
  auto one_v = vec({1.0});
  CHECK_THROWS_AS(align::fit_scale_shift(one, one_v), AlignmentError);

  auto z4 = vec({0.1, 0.3, 0.5, 0.5});
  auto v4 = vec({0.4, 0.7, 1.2, 1.0});
  const auto [s, t] = oracle::affine_lsq(z4, v4);
  const auto f4 = align::fit_scale_shift(z4, v4);
  CHECK(std::abs(f4.scale - s) < 1e-9);
  CHECK(std::abs(f4.shift - t) < 1e-9);
}

TEST_CASE("scale-only fit") {
  auto z = vec({0.2, 0.4});
  auto v = vec({0.4, 0.8});
  CHECK(align::fit_scale_only(z, v) == doctest::Approx(2.0).epsilon(1e-15));
  auto z1 = vec({1.0});
  auto v1 = vec({0.7});
  CHECK(align::fit_scale_only(z1, v1) == 0.7);
  auto z2 = vec({0.50, 0.51});
  auto v2 = vec({0.80, 0.79});
  CHECK(align::fit_scale_only(z2, v2) == doctest::Approx((0.5 * 0.8 + 0.51 * 0.79) / (0.25 + 0.51 * 0.51)));
  auto zero = vec({0.0, 0.0});
  CHECK_THROWS_AS(align::fit_scale_only(zero, v), AlignmentError);
  auto neg = vec({-0.5});
  auto pos = vec({1.0});
  try {
    align::fit_scale_only(neg, pos);
    FAIL("no error");
  } catch (const AlignmentError& e) {
    CHECK(e.kind() == AlignmentError::Kind::kInconsistentMeasurements);
  }
}

TEST_CASE("global alignment falls back on a negative slope") {
  auto [z, pts] = strip({0.50, 0.51}, {0.80, 0.79});
  CHECK((0.79 - 0.80) / (0.51 - 0.50) < 0);
  const auto r = align::align_global(z, pts);
  CHECK(r.fit.mode == FitMode::kScaleOnly);
  CHECK(r.fit.shift == 0.0);
  CHECK(std::abs(r.fit.scale - (0.5 * 0.8 + 0.51 * 0.79) / (0.25 + 0.51 * 0.51)) < 1e-12);
}

TEST_CASE("global alignment on an exact affine relation") {
  auto [z, pts] = strip({0.1, 0.2, 0.3, 0.45}, {0.3, 0.5, 0.7, 1.0});
  const auto r = align::align_global(z, pts);
  CHECK(r.fit.mode == FitMode::kScaleShift);
  CHECK(r.fit.scale == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.fit.shift == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.aligned.space() == DepthSpace::kInverse);
  // monotone map keeps the ordering
  for (int u = 1; u < 4; ++u) CHECK(r.aligned.at(u, 0) > r.aligned.at(u - 1, 0));
}

TEST_CASE("global alignment with a single point is scale only") {
  auto [z, pts] = strip({0.4}, {0.8});
  const auto r = align::align_global(z, pts);
  CHECK(r.fit.mode == FitMode::kScaleOnly);
  CHECK(r.fit.scale == doctest::Approx(2.0));
}

TEST_CASE("non-positive aligned pixels are masked") {
  // s = 2, t = -0.5 turns z = 0.1 into -0.3
  const auto z = DepthRaster::dense(4, 1, DepthSpace::kAffine, {0.1, 0.5, 0.6, 0.7});
  const SparsePointSet pts({{1, 0, 1 / 0.5}, {2, 0, 1 / 0.7}, {3, 0, 1 / 0.9}});
  const auto r = align::align_global(z, pts);
  CHECK(r.fit.mode == FitMode::kScaleShift);
  CHECK_FALSE(r.aligned.valid(0, 0));
  CHECK(r.aligned.valid(1, 0));
}

TEST_CASE("alignment without usable points fails") {
  const auto z = DepthRaster(2, 1, DepthSpace::kAffine, {0.1, 0.2}, {0, 1});
  const SparsePointSet pts({{0, 0, 1.0}});
  try {
    align::align_global(z, pts);
    FAIL("no error");
  } catch (const AlignmentError& e) {
    CHECK(e.kind() == AlignmentError::Kind::kInsufficientPoints);
  }
}

TEST_CASE("random affine frames are recovered exactly") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const double s = rng.uniform(0.5, 2.0), t = rng.uniform(-0.1, 0.1);
    std::vector<double> zv(400), vv(400);
    for (int i = 0; i < 400; ++i) {
      zv[i] = rng.uniform(0.2, 1.0);
      vv[i] = s * zv[i] + t;
    }
    auto [z, pts] = strip(zv, vv);
    const auto r = align::align_global(z, pts);
    CHECK(r.fit.mode == FitMode::kScaleShift);
    CHECK(std::abs(r.fit.scale - s) < 1e-9);
    CHECK(std::abs(r.fit.shift - t) < 1e-9);
  }
}

TEST_CASE("laser scale") {
  const CameraIntrinsics k{500, 500, 320, 240};
  CHECK(align::laser_scale({300, 1.0}, {340, 1.0}, k, 0.1) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(align::laser_scale({300, 2.0}, {340, 2.0}, k, 0.1) == doctest::Approx(0.4).epsilon(1e-14));
  // shifting both columns with the principal point changes nothing
  const CameraIntrinsics k2{500, 500, 330, 240};
  CHECK(align::laser_scale({310, 1.0}, {350, 1.0}, k2, 0.1) == doctest::Approx(0.8).epsilon(1e-14));
  try {
    align::laser_scale({340, 1.0}, {300, 1.0}, k, 0.1);
    FAIL("no error");
  } catch (const AlignmentError& e) {
    CHECK(e.kind() == AlignmentError::Kind::kInconsistentLaserGeometry);
  }
}

TEST_CASE("laser alignment recovers the metric scale of a synthetic scene") {
  for (double depth : {1.0, 1.7, 2.5}) {
    synth::SceneSpec spec;
    spec.layout = synth::Layout::kPlane;
    spec.min_depth = depth;
    const auto scene = synth::generate_scene(spec);
    synth::OracleSpec os;
    os.s_true = 1.6;
    const auto z = synth::oracle_relative(scene.gt, os);
    const auto k = synth::default_intrinsics(spec.width, spec.height);
    sim::PatternSpec ps;
    ps.kind = sim::PatternKind::kLaser2;
    const auto pts = sim::sample_pattern(scene.gt, ps, nullptr, k).points;
    REQUIRE(pts.size() == 2);
    const auto r = align::align_laser(z, pts, k, 0.1);
    CHECK(r.fit.mode == FitMode::kLaserBaseline);
    CHECK(r.fit.shift == 0.0);
    CHECK(std::abs(r.fit.scale - 1.6) < 1e-6);
  }
}
