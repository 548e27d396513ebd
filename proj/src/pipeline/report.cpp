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

#include "spade/pipeline/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "spade/core/error.hpp"
#include "spade/core/io.hpp"

namespace spade::pipeline {

std::array<std::uint8_t, 3> heat_color(double t) {
  t = std::clamp(std::isfinite(t) ? t : 1.0, 0.0, 1.0);
  auto ch = [](double x) { return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(x, 0.0, 1.0))); };
  // Three equal legs: red rises, then green, then blue.
  return {ch(3 * t), ch(3 * t - 1), ch(3 * t - 2)};
}

std::vector<std::uint8_t> error_map_ppm(const DepthRaster& pred, const DepthRaster& gt,
                                        double max_error) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw ShapeError("error map: prediction and ground truth sizes differ");
  }
  if (!(max_error > 0)) throw ConfigError("error map: max_error must be > 0");
  const std::string header =
      "P6\n" + std::to_string(gt.width()) + " " + std::to_string(gt.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + gt.size() * 3);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    std::array<std::uint8_t, 3> c{0, 0, 0};
    if (pred.mask()[i] && gt.mask()[i]) {
      c = heat_color(std::abs(pred.values()[i] - gt.values()[i]) / max_error);
    }
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string metrics_markdown(const EvalReport& r) {
  std::ostringstream os;
  os << "| frame | status | points | mode | MAE | RMSE | AbsRel | SILog | iMAE | GA MAE |\n"
     << "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& f : r.frames) {
    os << "| " << f.index << " | " << f.status << " | " << f.point_count << " | ";
    if (f.refined && f.ga) {
      os << align::to_string(f.fit.mode) << " | " << fmt(f.refined->mae) << " | "
         << fmt(f.refined->rmse) << " | " << fmt(f.refined->absrel) << " | "
         << fmt(f.refined->silog) << " | " << fmt(f.refined->imae) << " | " << fmt(f.ga->mae)
         << " |\n";
    } else {
      os << "- | - | - | - | - | - | - |\n";
    }
  }
  return os.str();
}

std::string metrics_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "frame,status,points,mode,mae,rmse,absrel,silog,imae,ga_mae,ga_rmse,ga_absrel,ga_silog,ga_imae\n";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  for (const auto& f : r.frames) {
    os << f.index << ',' << f.status << ',' << f.point_count << ',';
    if (f.refined && f.ga) {
      const auto& a = *f.refined;
      const auto& g = *f.ga;
      os << align::to_string(f.fit.mode) << ',' << num(a.mae) << ',' << num(a.rmse) << ','
         << num(a.absrel) << ',' << num(a.silog) << ',' << num(a.imae) << ',' << num(g.mae) << ','
         << num(g.rmse) << ',' << num(g.absrel) << ',' << num(g.silog) << ',' << num(g.imae);
    } else {
      os << ",,,,,,,,,,";
    }
    os << '\n';
  }
  return os.str();
}

void render_report(const EvalReport& report, const std::vector<Frame>& frames,
                   const std::filesystem::path& out_dir, double max_error) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  for (const auto& f : report.frames) {
    const auto& gt = frames.at(static_cast<std::size_t>(f.index)).gt;
    const std::string stem = "error_" + std::to_string(f.index);
    if (f.refined_depth) write_file(out_dir / (stem + "_refined.ppm"), error_map_ppm(*f.refined_depth, gt, max_error));
    if (f.ga_depth) write_file(out_dir / (stem + "_ga.ppm"), error_map_ppm(*f.ga_depth, gt, max_error));
  }
  write_text(out_dir / "metrics.md", metrics_markdown(report));
  write_text(out_dir / "metrics.csv", metrics_csv(report));
  write_text(out_dir / "report.json", to_json(report).dump(2) + "\n");
}

}  // namespace spade::pipeline
