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

#include <atomic>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "spade/core/error.hpp"
#include "spade/core/io.hpp"
#include "spade/nn/checkpoint.hpp"
#include "spade/pipeline/config.hpp"
#include "spade/pipeline/dataset.hpp"
#include "spade/pipeline/evaluate.hpp"
#include "spade/pipeline/frame.hpp"
#include "spade/pipeline/parallel.hpp"
#include "spade/pipeline/report.hpp"
#include "spade/pipeline/train.hpp"

using namespace spade;
using namespace spade::pipeline;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.network.widths = {8, 8, 8, 8};
  cfg.network.heads = {1, 1, 1, 1};
  cfg.network.conv_blocks = {1, 1, 1, 1};
  cfg.network.transformer_blocks = {1, 1, 1, 1};
  cfg.data.train_frames = 4;
  cfg.data.val_frames = 2;
  cfg.data.test_frames = 3;
  cfg.schedule.epochs = 1;
  cfg.schedule.batch = 2;
  cfg.optimizer.decay_after_epoch = 1;
  return cfg;
}

}  // namespace

TEST_CASE("run config json round trip") {
  RunConfig cfg = small_config();
  cfg.seed = 123;
  cfg.pattern.kind = sim::PatternKind::kSonarLine;
  const auto back = run_config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(config_hash(back) == config_hash(cfg));
  cfg.seed = 124;
  CHECK(config_hash(back) != config_hash(cfg));

  CHECK_THROWS_AS(run_config_from_json(json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"schedule", {{"epochs", "ten"}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"schedule", {{"batch", 0}}}}), ConfigError);
  const auto partial = run_config_from_json(json{{"seed", 9}});
  CHECK(partial.seed == 9);
  CHECK(partial.optimizer.lr == 2e-4);
  CHECK(partial.optimizer.lr_late == 5e-5);
  CHECK(partial.optimizer.decay_after_epoch == 6);
}

TEST_CASE("sweep spec json") {
  SweepSpec s;
  s.patterns = {sim::PatternKind::kUniformGrid, sim::PatternKind::kDvl4};
  s.caps = {5, 10};
  const auto back = sweep_spec_from_json(to_json(s));
  CHECK(back.patterns == s.patterns);
  CHECK(back.caps == s.caps);
  CHECK(back.counts == s.counts);
  CHECK_THROWS_AS(sweep_spec_from_json(json{{"counts", {0}}}), ConfigError);
}

TEST_CASE("frames are deterministic per seed and split") {
  const auto cfg = small_config();
  const auto a = make_frame(cfg, Split::kTest, 1);
  const auto b = make_frame(cfg, Split::kTest, 1);
  CHECK(encode_raster(a.relative) == encode_raster(b.relative));
  CHECK(format_points_csv(a.points) == format_points_csv(b.points));
  CHECK(encode_raster(make_frame(cfg, Split::kTrain, 1).gt) != encode_raster(a.gt));
  CHECK(frame_seed(7, Split::kTest, 0) != frame_seed(7, Split::kVal, 0));
  CHECK(a.points.size() == std::size_t(cfg.data.points));
  CHECK(make_split(cfg, Split::kVal).size() == 2);
}

TEST_CASE("neutral model reproduces global alignment") {
  const auto cfg = small_config();
  auto model = make_model(cfg);
  model->set_training(false);
  const auto f = make_frame(cfg, Split::kTest, 0);
  const auto r = run_frame(*model, f.relative, f.guide, f.points, cfg.jbu, &f.gt, cfg.range_cap);
  REQUIRE(r.refined_metrics);
  double worst = 0;
  for (std::size_t i = 0; i < r.ga_depth.size(); ++i) {
    CHECK(r.ga_depth.mask()[i] == r.refined_depth.mask()[i]);
    if (r.ga_depth.mask()[i]) worst = std::max(worst, std::abs(r.ga_depth.values()[i] - r.refined_depth.values()[i]));
  }
  CHECK(worst <= 1e-12);
  CHECK(r.refined_metrics->mae == doctest::Approx(r.ga_metrics->mae).epsilon(1e-12));
}

TEST_CASE("laser points route through the baseline scale") {
  const auto cfg = small_config();
  auto model = make_model(cfg);
  model->set_training(false);
  const auto f = make_frame(cfg, Split::kTest, 2);
  // a plane close enough for both spots
  synth::SceneSpec spec = f.scene;
  spec.layout = synth::Layout::kPlane;
  spec.min_depth = 1.2;
  const auto scene = synth::generate_scene(spec);
  const auto rel = synth::oracle_relative(scene.gt, f.oracle);
  sim::PatternSpec ps;
  ps.kind = sim::PatternKind::kLaser2;
  const auto pts = sim::sample_pattern(scene.gt, ps, nullptr, f.intrinsics).points;
  REQUIRE(pts.size() == 2);
  const auto r = run_frame(*model, rel, scene.guide, pts, cfg.jbu, &scene.gt, cfg.range_cap,
                           LaserSetup{f.intrinsics, 0.1});
  CHECK(r.fit.mode == align::FitMode::kLaserBaseline);
  CHECK(r.fit.shift == 0.0);
}

TEST_CASE("sweep sources nest across counts") {
  const auto cfg = small_config();
  const auto f = make_frame(cfg, Split::kTest, 0);
  std::set<std::pair<int, int>> prev;
  for (int n : {200, 100, 50, 10}) {
    const auto pts = sweep_source(cfg, sim::PatternKind::kFeatureLike, n)(f, 0).points;
    CHECK(pts.size() == std::size_t(n));
    std::set<std::pair<int, int>> cur;
    for (const auto& p : pts) cur.insert({p.col(), p.row()});
    for (const auto& p : cur) {
      if (!prev.empty()) CHECK(prev.count(p) == 1);
    }
    prev = cur;
  }
}

TEST_CASE("evaluation records failures without aborting") {
  const auto cfg = small_config();
  auto model = make_model(cfg);
  model->set_training(false);
  const auto frames = make_split(cfg, Split::kTest);
  const PointSource none = [](const Frame&, int) { return FramePoints{}; };
  const auto rep = evaluate(*model, frames, cfg, none, cfg.range_cap);
  CHECK(rep.frames.size() == 3);
  for (const auto& f : rep.frames) CHECK(f.status == "no_points");
  CHECK(rep.refined.frame_count == 0);
  CHECK(rep.refined.skipped_frames == 3);

  const auto ok = evaluate(*model, frames, cfg);
  for (const auto& f : ok.frames) CHECK(f.status == "ok");
  CHECK(ok.refined.mae == doctest::Approx(ok.ga.mae).epsilon(1e-12));
}

TEST_CASE("report artifacts") {
  const auto cfg = small_config();
  auto model = make_model(cfg);
  model->set_training(false);
  const auto frames = make_split(cfg, Split::kTest);
  const auto rep = evaluate(*model, frames, cfg, true);
  const auto dir = std::filesystem::temp_directory_path() / "spade_report_test";
  std::filesystem::remove_all(dir);
  render_report(rep, frames, dir);
  CHECK(std::filesystem::exists(dir / "metrics.md"));
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "error_0_refined.ppm"));
  const auto csv = read_text(dir / "metrics.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3);

  // a perfect prediction maps to black
  const auto img = error_map_ppm(frames[0].gt, frames[0].gt, 1.0);
  const std::string header = "P6\n96 64\n255\n";
  CHECK(std::string(img.begin(), img.begin() + long(header.size())) == header);
  for (std::size_t i = header.size(); i < img.size(); ++i) CHECK(img[i] == 0);

  // the colour ramp never decreases in any channel
  auto prev = heat_color(0.0);
  for (int i = 1; i <= 100; ++i) {
    const auto c = heat_color(i / 100.0);
    for (int k = 0; k < 3; ++k) CHECK(c[k] >= prev[k]);
    CHECK(c[0] + c[1] + c[2] > prev[0] + prev[1] + prev[2] - 1);
    prev = c;
  }
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, [&](int i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, [](int i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("short training run is reproducible") {
  const auto cfg = small_config();
  const auto a = train(cfg);
  const auto b = train(cfg);
  REQUIRE(a.log.size() == 1);
  CHECK(std::isfinite(a.log[0].train_loss));
  const auto meta = checkpoint_metadata(cfg, a.log).dump();
  CHECK(nn::encode_checkpoint(*a.model, meta) == nn::encode_checkpoint(*b.model, meta));
  CHECK(checkpoint_metadata(cfg, b.log).dump() == meta);
}
