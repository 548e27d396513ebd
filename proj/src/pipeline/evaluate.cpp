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

#include "spade/pipeline/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "spade/core/error.hpp"
#include "spade/pipeline/parallel.hpp"
#include "spade/synth/scene.hpp"

namespace spade::pipeline {
namespace {

FrameRecord run_record(SpadeModel& model, const Frame& f, int index, const RunConfig& cfg,
                       const PointSource& source, double cap, bool keep) {
  FrameRecord rec;
  rec.index = index;
  FramePoints fp = source(f, index);
  rec.point_count = fp.points.size();
  if (fp.points.empty()) {
    rec.status = "no_points";
    return rec;
  }
  try {
    FrameResult r = run_frame(model, f.relative, f.guide, fp.points, cfg.jbu, &f.gt, cap, fp.laser);
    rec.fit = r.fit;
    rec.refined = r.refined_metrics;
    rec.ga = r.ga_metrics;
    rec.status = rec.refined && rec.ga ? "ok" : "empty_mask";
    if (keep) {
      rec.refined_depth = std::move(r.refined_depth);
      rec.ga_depth = std::move(r.ga_depth);
    }
  } catch (const align::AlignmentError& e) {
    rec.status = "alignment_failed";
    rec.detail = e.what();
  }
  return rec;
}

void aggregate_into(EvalReport& rep, double cap) {
  std::vector<std::optional<loss::MetricReport>> refined, ga;
  for (const auto& r : rep.frames) {
    const bool ok = r.status == "ok";
    refined.push_back(ok ? r.refined : std::nullopt);
    ga.push_back(ok ? r.ga : std::nullopt);
  }
  rep.refined = loss::aggregate(refined, cap);
  rep.ga = loss::aggregate(ga, cap);
  rep.range_cap = cap;
}

}  // namespace

EvalReport evaluate(SpadeModel& model, const std::vector<Frame>& frames, const RunConfig& cfg,
                    const PointSource& source, double range_cap, bool keep_depths) {
  model.set_training(false);
  EvalReport rep;
  rep.frames.resize(frames.size());
  parallel_for(static_cast<int>(frames.size()), [&](int i) {
    rep.frames[static_cast<std::size_t>(i)] =
        run_record(model, frames[static_cast<std::size_t>(i)], i, cfg, source, range_cap, keep_depths);
  });
  aggregate_into(rep, range_cap);

  std::vector<double> depths;
  double count_sum = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const FramePoints fp = source(frames[i], static_cast<int>(i));
    count_sum += static_cast<double>(fp.points.size());
    for (const auto& p : fp.points) depths.push_back(p.depth_m);
  }
  if (!frames.empty()) rep.points.mean_count = count_sum / static_cast<double>(frames.size());
  if (!depths.empty()) {
    std::sort(depths.begin(), depths.end());
    rep.points.min_depth = depths.front();
    rep.points.max_depth = depths.back();
    double s = 0;
    for (double d : depths) s += d;
    rep.points.mean_depth = s / static_cast<double>(depths.size());
    const std::size_t m = depths.size() / 2;
    rep.points.median_depth = depths.size() % 2 ? depths[m] : 0.5 * (depths[m - 1] + depths[m]);
  }
  return rep;
}

EvalReport evaluate(SpadeModel& model, const std::vector<Frame>& frames, const RunConfig& cfg,
                    bool keep_depths) {
  return evaluate(
      model, frames, cfg, [](const Frame& f, int) { return FramePoints{f.points, std::nullopt}; },
      cfg.range_cap, keep_depths);
}

PointSource sweep_source(const RunConfig& cfg, sim::PatternKind pattern, int count) {
  const std::uint64_t seed = cfg.seed;
  switch (pattern) {
    case sim::PatternKind::kFeatureLike:
      return [seed, count](const Frame& f, int index) {
        const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(count), f.points.size());
        return FramePoints{sim::subsample(f.points, keep, frame_seed(seed, Split::kTest, index)),
                           std::nullopt};
      };
    case sim::PatternKind::kUniformGrid:
      return [count](const Frame& f, int) {
        sim::PatternSpec p;
        p.kind = sim::PatternKind::kUniformGrid;
        const double aspect = static_cast<double>(f.gt.height()) / f.gt.width();
        p.grid_rows = std::max(1, static_cast<int>(std::lround(std::sqrt(count * aspect))));
        p.grid_cols = std::max(1, static_cast<int>(std::lround(count / static_cast<double>(p.grid_rows))));
        return FramePoints{sim::sample_pattern(f.gt, p).points, std::nullopt};
      };
    case sim::PatternKind::kSonarLine:
      return [seed, count](const Frame& f, int index) {
        sim::PatternSpec p;
        p.kind = sim::PatternKind::kSonarLine;
        p.count = std::max(count, 1);
        p.seed = frame_seed(seed, Split::kTest, index);
        auto pts = sim::sample_pattern(f.gt, p).points;
        const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(count), pts.size());
        return FramePoints{sim::subsample(pts, keep, p.seed), std::nullopt};
      };
    case sim::PatternKind::kDvl4:
      return [](const Frame& f, int) {
        sim::PatternSpec p;
        p.kind = sim::PatternKind::kDvl4;
        return FramePoints{sim::sample_pattern(f.gt, p).points, std::nullopt};
      };
    case sim::PatternKind::kLaser2:
      return [](const Frame& f, int) {
        sim::PatternSpec p;
        p.kind = sim::PatternKind::kLaser2;
        auto pts = sim::sample_pattern(f.gt, p, nullptr, f.intrinsics).points;
        if (pts.size() != 2) return FramePoints{};
        return FramePoints{std::move(pts), LaserSetup{f.intrinsics, p.laser_baseline}};
      };
  }
  throw ConfigError("sweep: unsupported pattern");
}

SweepReport sweep(SpadeModel& model, const std::vector<Frame>& frames, const RunConfig& cfg,
                  const SweepSpec& spec) {
  spec.validate();
  SweepReport out;
  for (auto pattern : spec.patterns) {
    for (int count : spec.counts) {
      const double first_cap = spec.caps.front();
      EvalReport rep = evaluate(model, frames, cfg, sweep_source(cfg, pattern, count), first_cap, true);
      for (double cap : spec.caps) {
        EvalReport capped;
        capped.frames = rep.frames;
        for (auto& r : capped.frames) {
          if (r.status != "ok" && r.status != "empty_mask") continue;
          r.refined = loss::frame_metrics(*r.refined_depth, frames[static_cast<std::size_t>(r.index)].gt, cap);
          r.ga = loss::frame_metrics(*r.ga_depth, frames[static_cast<std::size_t>(r.index)].gt, cap);
          r.status = r.refined && r.ga ? "ok" : "empty_mask";
        }
        aggregate_into(capped, cap);
        out.cells.push_back({pattern, count, cap, capped.refined, capped.ga, rep.points.mean_count});
      }
    }
  }
  return out;
}

json to_json(const loss::MetricReport& m) {
  return {{"mae", m.mae},         {"rmse", m.rmse},
          {"absrel", m.absrel},   {"silog", m.silog},
          {"imae", m.imae},       {"range_cap", m.range_cap},
          {"frames", m.frame_count}, {"skipped_frames", m.skipped_frames},
          {"pixels", m.pixel_count}};
}

json to_json(const EvalReport& r) {
  json frames = json::array();
  for (const auto& f : r.frames) {
    json j = {{"index", f.index}, {"status", f.status}, {"points", f.point_count}};
    if (!f.detail.empty()) j["detail"] = f.detail;
    if (f.status != "alignment_failed" && f.status != "no_points") {
      j["fit"] = {{"scale", f.fit.scale},
                  {"shift", f.fit.shift},
                  {"mode", std::string(align::to_string(f.fit.mode))},
                  {"residual_rms", f.fit.residual_rms}};
    }
    if (f.refined) j["refined"] = to_json(*f.refined);
    if (f.ga) j["ga"] = to_json(*f.ga);
    frames.push_back(j);
  }
  return {{"range_cap", r.range_cap},
          {"aggregate", {{"refined", to_json(r.refined)}, {"ga", to_json(r.ga)}}},
          {"points",
           {{"mean_count", r.points.mean_count},
            {"min_depth", r.points.min_depth},
            {"max_depth", r.points.max_depth},
            {"mean_depth", r.points.mean_depth},
            {"median_depth", r.points.median_depth}}},
          {"frames", frames}};
}

json to_json(const SweepReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"pattern", sim::to_string(c.pattern)},
                     {"count", c.count},
                     {"cap", c.cap},
                     {"mean_points", c.mean_points},
                     {"refined", to_json(c.refined)},
                     {"ga", to_json(c.ga)},
                     {"diff_vs_ga",
                      {{"mae", c.refined.mae - c.ga.mae},
                       {"rmse", c.refined.rmse - c.ga.rmse},
                       {"absrel", c.refined.absrel - c.ga.absrel},
                       {"silog", c.refined.silog - c.ga.silog},
                       {"imae", c.refined.imae - c.ga.imae}}}});
  }
  return {{"cells", cells}};
}

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "pattern,count,cap,frames,skipped,mean_points,mae,rmse,absrel,silog,imae,"
        "ga_mae,ga_rmse,ga_absrel,ga_silog,ga_imae,d_mae,d_rmse,d_absrel,d_silog,d_imae\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  for (const auto& c : r.cells) {
    const auto& a = c.refined;
    const auto& g = c.ga;
    os << sim::to_string(c.pattern) << ',' << c.count << ',' << num(c.cap) << ',' << a.frame_count
       << ',' << a.skipped_frames << ',' << num(c.mean_points) << ',' << num(a.mae) << ','
       << num(a.rmse) << ',' << num(a.absrel) << ',' << num(a.silog) << ',' << num(a.imae) << ','
       << num(g.mae) << ',' << num(g.rmse) << ',' << num(g.absrel) << ',' << num(g.silog) << ','
       << num(g.imae) << ',' << num(a.mae - g.mae) << ',' << num(a.rmse - g.rmse) << ','
       << num(a.absrel - g.absrel) << ',' << num(a.silog - g.silog) << ',' << num(a.imae - g.imae)
       << '\n';
  }
  return os.str();
}

}  // namespace spade::pipeline
