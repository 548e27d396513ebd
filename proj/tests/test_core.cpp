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

#include <cstring>
#include <filesystem>

#include "spade/core/error.hpp"
#include "spade/core/io.hpp"
#include "spade/core/rng.hpp"
#include "spade/core/types.hpp"

using namespace spade;

namespace {

DepthRaster random_raster(int w, int h, DepthSpace space, std::uint64_t seed, bool holes) {
  Rng rng(seed);
  std::vector<double> v(std::size_t(w) * h);
  std::vector<std::uint8_t> m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    // values representable in f32 so the file round trip is exact
    v[i] = double(float(rng.uniform(0.1, 10.0)));
    if (holes && rng.uniform() < 0.1) {
      m[i] = 0;
      v[i] = 0;
    }
  }
  return DepthRaster(w, h, space, v, m);
}

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("spade_core_" + name);
}

}  // namespace

TEST_CASE("reciprocal conversions") {
  const auto r = DepthRaster::dense(2, 1, DepthSpace::kMetric, {2.0, 4.0});
  const auto inv = to_inverse(r);
  CHECK(inv.space() == DepthSpace::kInverse);
  CHECK(inv.at(0, 0) == 0.5);
  CHECK(inv.at(1, 0) == 0.25);
  CHECK(to_inverse(DepthRaster::dense(1, 1, DepthSpace::kMetric, {1.0})).at(0, 0) == 1.0);
  CHECK(to_inverse(DepthRaster::dense(1, 1, DepthSpace::kMetric, {2.37})).at(0, 0) ==
        doctest::Approx(0.42194092827).epsilon(1e-10));
  CHECK(from_inverse(DepthRaster::dense(1, 1, DepthSpace::kInverse, {0.5})).at(0, 0) == 2.0);

  const auto big = random_raster(17, 9, DepthSpace::kMetric, 3, true);
  const auto back = from_inverse(to_inverse(big));
  for (std::size_t i = 0; i < big.size(); ++i) {
    CHECK(back.mask()[i] == big.mask()[i]);
    if (big.mask()[i]) CHECK(std::abs(back.values()[i] - big.values()[i]) <= 1e-12);
  }
  CHECK_THROWS_AS(to_inverse(DepthRaster::dense(1, 1, DepthSpace::kAffine, {-1.0})), DomainError);
}

TEST_CASE("raster invariants") {
  CHECK_THROWS_AS(DepthRaster::dense(2, 1, DepthSpace::kMetric, {1.0, -1.0}), DomainError);
  CHECK_THROWS(DepthRaster::dense(2, 2, DepthSpace::kMetric, {1.0}));
  CHECK_NOTHROW(DepthRaster::dense(1, 1, DepthSpace::kAffine, {-0.5}));
  // invalid pixels may hold anything
  CHECK_NOTHROW(DepthRaster(2, 1, DepthSpace::kMetric, {1.0, -3.0}, {1, 0}));
}

TEST_CASE("FDR1 round trip") {
  const auto small = random_raster(3, 2, DepthSpace::kInverse, 1, false);
  const auto bytes = encode_raster(small);
  CHECK(bytes.size() == 4 + 4 + 4 + 1 + 6 * 4 + 6);
  CHECK(std::memcmp(bytes.data(), "FDR1", 4) == 0);
  CHECK(encode_raster(decode_raster(bytes)) == bytes);

  const auto big = random_raster(448, 336, DepthSpace::kMetric, 2, true);
  write_raster(big, tmp("big.fdr"));
  const auto back = read_raster(tmp("big.fdr"));
  CHECK(back.width() == 448);
  CHECK(back.height() == 336);
  CHECK(back.space() == DepthSpace::kMetric);
  CHECK(back.mask() == big.mask());
  CHECK(back.values() == big.values());
}

TEST_CASE("FDR1 rejects malformed input") {
  auto bytes = encode_raster(random_raster(3, 2, DepthSpace::kMetric, 1, false));
  auto bad = bytes;
  std::memcpy(bad.data(), "XXXX", 4);
  try {
    decode_raster(bad);
    FAIL("accepted bad magic");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 0);
  }
  auto cut = bytes;
  cut.resize(cut.size() - 3);
  CHECK_THROWS_AS(decode_raster(cut), FormatError);
  auto tag = bytes;
  tag[12] = 9;
  CHECK_THROWS_AS(decode_raster(tag), FormatError);
  auto huge = bytes;
  huge[4] = huge[5] = huge[6] = huge[7] = 0xff;
  CHECK_THROWS_AS(decode_raster(huge), FormatError);
  CHECK_THROWS_AS(read_raster(tmp("does_not_exist.fdr")), IoError);
}

TEST_CASE("points CSV") {
  const SparsePointSet pts({{1, 2, 0.5}, {3.25, 4, 2.0}});
  const auto text = format_points_csv(pts);
  CHECK(text.rfind("u,v,depth_m\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const auto back = parse_points_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[1].u == 3.25);
  CHECK(back[1].depth_m == 2.0);
  CHECK_THROWS_AS(parse_points_csv("x,y,z\n1,2,3\n"), FormatError);
  CHECK_THROWS(parse_points_csv("u,v,depth_m\n1,2,-3\n"));
  CHECK_THROWS(parse_points_csv("u,v,depth_m\n1,2,abc\n"));
}

TEST_CASE("sparse point sets reject duplicates and out-of-range points") {
  CHECK_THROWS(SparsePointSet({{1, 1, 1.0}, {1.2, 0.9, 2.0}}));
  CHECK_THROWS(SparsePointSet({{1, 1, 0.0}}));
  const SparsePointSet pts({{5, 1, 1.0}});
  CHECK_THROWS_AS(pts.check_bounds(5, 5), DomainError);
  CHECK_NOTHROW(pts.check_bounds(6, 5));
}

TEST_CASE("scale maps and images travel as FDR1") {
  ScaleMap m = ScaleMap::zeros(4, 3);
  m.values[5] = 1.5;
  m.known[5] = 1;
  write_scale_map(m, tmp("scale.fdr"));
  const auto back = read_scale_map(tmp("scale.fdr"));
  CHECK(back.values == m.values);
  CHECK(back.known == m.known);

  Image img{3, 2, {0, 0.25, 0.5, 0.75, 1, 0.125}};
  write_image(img, tmp("img.fdr"));
  CHECK(read_image(tmp("img.fdr")).values == img.values);
}

TEST_CASE("rng streams are reproducible") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(c.below(7) < 7u);
  }
}
