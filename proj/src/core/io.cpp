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

#include "spade/core/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "spade/core/error.hpp"

namespace spade {

namespace {

constexpr char kMagic[4] = {'F', 'D', 'R', '1'};
constexpr std::size_t kHeaderBytes = 13;
// Payload cap; anything larger is treated as a corrupt header.
constexpr std::uint64_t kMaxPixels = std::uint64_t{1} << 28;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return x;
}

struct RawRaster {
  int width;
  int height;
  std::uint8_t tag;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
};

std::vector<std::uint8_t> encode_raw(int width, int height, std::uint8_t tag,
                                     const std::vector<double>& values,
                                     const std::vector<std::uint8_t>& mask) {
  const std::size_t n = values.size();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 5 * n);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(width));
  put_u32(out, static_cast<std::uint32_t>(height));
  out.push_back(tag);
  for (std::size_t i = 0; i < n; ++i) {
    // Invalid pixels carry no meaningful value; store zero so files are
    // canonical.
    const float f = mask[i] ? static_cast<float>(values[i]) : 0.0f;
    put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  for (std::size_t i = 0; i < n; ++i) out.push_back(mask[i] ? 1 : 0);
  return out;
}

RawRaster decode_raw(std::span<const std::uint8_t> b) {
  if (b.size() < 4) throw FormatError("truncated FDR1 header", b.size());
  if (std::memcmp(b.data(), kMagic, 4) != 0) {
    throw FormatError("bad magic, expected \"FDR1\"", 0);
  }
  if (b.size() < kHeaderBytes) throw FormatError("truncated FDR1 header", b.size());
  const std::uint32_t w = get_u32(b, 4);
  const std::uint32_t h = get_u32(b, 8);
  const std::uint8_t tag = b[12];
  if (w > static_cast<std::uint32_t>(std::numeric_limits<int>::max()) ||
      h > static_cast<std::uint32_t>(std::numeric_limits<int>::max()) ||
      static_cast<std::uint64_t>(w) * h > kMaxPixels) {
    throw FormatError("dimension overflow " + std::to_string(w) + "x" +
                          std::to_string(h),
                      4);
  }
  if (tag > 2) {
    throw FormatError("unknown space tag " + std::to_string(tag), 12);
  }
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::size_t need = kHeaderBytes + 5 * n;
  if (b.size() < need) throw FormatError("truncated FDR1 payload", b.size());
  if (b.size() > need) throw FormatError("trailing bytes after FDR1 payload", need);
  RawRaster r{static_cast<int>(w), static_cast<int>(h), tag, {}, {}};
  r.values.resize(n);
  r.mask.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.values[i] = std::bit_cast<float>(get_u32(b, kHeaderBytes + 4 * i));
  }
  const std::size_t mask_at = kHeaderBytes + 4 * n;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t m = b[mask_at + i];
    if (m > 1) throw FormatError("mask byte must be 0 or 1", mask_at + i);
    r.mask[i] = m;
  }
  return r;
}

}  // namespace

std::vector<std::uint8_t> encode_raster(const DepthRaster& raster) {
  return encode_raw(raster.width(), raster.height(),
                    static_cast<std::uint8_t>(raster.space()), raster.values(),
                    raster.mask());
}

DepthRaster decode_raster(std::span<const std::uint8_t> bytes) {
  RawRaster r = decode_raw(bytes);
  return DepthRaster(r.width, r.height, static_cast<DepthSpace>(r.tag),
                     std::move(r.values), std::move(r.mask));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

DepthRaster read_raster(const std::filesystem::path& path) {
  return decode_raster(read_file(path));
}

void write_raster(const DepthRaster& raster, const std::filesystem::path& path) {
  write_file(path, encode_raster(raster));
}

ScaleMap read_scale_map(const std::filesystem::path& path) {
  RawRaster r = decode_raw(read_file(path));
  ScaleMap m = ScaleMap::zeros(r.width, r.height);
  m.values = std::move(r.values);
  m.known = std::move(r.mask);
  // Non-zero values at unknown pixels arrived through propagation.
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.filled[i] = (!m.known[i] && m.values[i] != 0.0) ? 1 : 0;
  }
  m.validate();
  return m;
}

void write_scale_map(const ScaleMap& map, const std::filesystem::path& path) {
  // Values are written for every pixel; the mask byte carries known-ness.
  std::vector<std::uint8_t> full(map.size(), 1);
  auto bytes = encode_raw(map.width, map.height,
                          static_cast<std::uint8_t>(DepthSpace::kAffine),
                          map.values, full);
  const std::size_t mask_at = kHeaderBytes + 4 * map.size();
  for (std::size_t i = 0; i < map.size(); ++i) bytes[mask_at + i] = map.known[i];
  write_file(path, bytes);
}

Image read_image(const std::filesystem::path& path) {
  RawRaster r = decode_raw(read_file(path));
  return Image{r.width, r.height, std::move(r.values)};
}

void write_image(const Image& image, const std::filesystem::path& path) {
  std::vector<std::uint8_t> full(image.values.size(), 1);
  write_file(path, encode_raw(image.width, image.height,
                              static_cast<std::uint8_t>(DepthSpace::kAffine),
                              image.values, full));
}

std::string format_points_csv(const SparsePointSet& points) {
  std::string out = "u,v,depth_m\n";
  char line[128];
  for (const auto& p : points) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p.u, p.v_row,
                  p.depth_m);
    out += line;
  }
  return out;
}

SparsePointSet parse_points_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::uint64_t offset = 0;
  if (!std::getline(in, line)) throw FormatError("empty points file", 0);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "u,v,depth_m") {
    throw FormatError("expected header \"u,v,depth_m\"", 0);
  }
  offset += line.size() + 1;
  std::vector<SparsePoint> pts;
  while (std::getline(in, line)) {
    const std::uint64_t line_at = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    SparsePoint p;
    char* end = nullptr;
    const char* s = line.c_str();
    double* fields[3] = {&p.u, &p.v_row, &p.depth_m};
    for (int f = 0; f < 3; ++f) {
      *fields[f] = std::strtod(s, &end);
      if (end == s) throw FormatError("malformed number in points file", line_at + (s - line.c_str()));
      s = end;
      if (f < 2) {
        if (*s != ',') throw FormatError("expected ','", line_at + (s - line.c_str()));
        ++s;
      }
    }
    if (*s != '\0') throw FormatError("trailing characters", line_at + (s - line.c_str()));
    pts.push_back(p);
  }
  return SparsePointSet(std::move(pts));
}

SparsePointSet read_points(const std::filesystem::path& path) {
  return parse_points_csv(read_text(path));
}

void write_points(const SparsePointSet& points,
                  const std::filesystem::path& path) {
  write_text(path, format_points_csv(points));
}

}  // namespace spade
