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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spade/align/alignment.hpp"
#include "spade/core/error.hpp"
#include "spade/core/io.hpp"
#include "spade/densify/densify.hpp"
#include "spade/nn/checkpoint.hpp"
#include "spade/pipeline/config.hpp"
#include "spade/pipeline/dataset.hpp"
#include "spade/pipeline/evaluate.hpp"
#include "spade/pipeline/frame.hpp"
#include "spade/pipeline/gradcheck_suite.hpp"
#include "spade/pipeline/report.hpp"
#include "spade/pipeline/train.hpp"
#include "spade/sim/sensor.hpp"
#include "spade/synth/oracle.hpp"
#include "spade/synth/scene.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spade;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

std::vector<double> parse_list(const std::string& text, std::size_t n, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != n) {
    throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " comma-separated values");
  }
  return out;
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

fs::path out_dir(const Globals& g) {
  std::error_code ec;
  fs::create_directories(g.out_dir, ec);
  if (ec) throw IoError("cannot create " + g.out_dir + ": " + ec.message());
  return g.out_dir;
}

pipeline::RunConfig run_config(const Globals& g, const json* fallback = nullptr) {
  pipeline::RunConfig cfg;
  if (!g.config.empty()) {
    cfg = pipeline::load_run_config(g.config);
  } else if (fallback) {
    cfg = pipeline::run_config_from_json(*fallback);
  }
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

// Model from a checkpoint (its stored config is used unless --config is
// given) or the neutral model when no checkpoint is named.
struct LoadedModel {
  pipeline::RunConfig cfg;
  std::unique_ptr<pipeline::SpadeModel> model;
};

LoadedModel load_model(const Globals& g, const std::string& checkpoint) {
  LoadedModel out;
  if (checkpoint.empty()) {
    out.cfg = run_config(g);
    out.model = pipeline::make_model(out.cfg);
    return out;
  }
  // The stored config decides the architecture; read it first.
  const auto bytes = read_file(checkpoint);
  json meta;
  {
    pipeline::RunConfig probe_cfg = g.config.empty() ? pipeline::RunConfig{} : pipeline::load_run_config(g.config);
    auto probe = pipeline::make_model(probe_cfg);
    try {
      meta = json::parse(nn::decode_checkpoint(*probe, bytes));
    } catch (const FormatError&) {
      if (!g.config.empty()) throw;
    }
  }
  if (meta.is_null()) {
    // Architecture differs from the defaults: parse the manifest directly.
    const std::uint64_t len = [&] {
      std::uint64_t v = 0;
      for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes.at(4 + i)) << (8 * i);
      return v;
    }();
    const json manifest = json::parse(bytes.begin() + 12, bytes.begin() + 12 + static_cast<std::ptrdiff_t>(len));
    meta = json::parse(manifest.at("metadata").get<std::string>());
  }
  const json stored = meta.contains("config") ? meta.at("config") : json::object();
  out.cfg = run_config(g, &stored);
  out.model = pipeline::make_model(out.cfg);
  nn::decode_checkpoint(*out.model, bytes);
  out.model->set_training(false);
  return out;
}

void print_metrics(const char* label, const loss::MetricReport& m) {
  std::printf("%-8s MAE %.4f  RMSE %.4f  AbsRel %.4f  SILog %.4f  iMAE %.4f  (%zu frames, %zu skipped)\n",
              label, m.mae, m.rmse, m.absrel, m.silog, m.imae, m.frame_count, m.skipped_frames);
}

json fit_json(const align::AffineFit& f) {
  return {{"s", f.scale},
          {"t", f.shift},
          {"mode", std::string(align::to_string(f.mode))},
          {"residual_rms", f.residual_rms},
          {"point_count", f.point_count}};
}

// --- subcommands

int cmd_synth(const Globals& g, const std::string& spec_path) {
  synth::SceneSpec scene;
  synth::OracleSpec oracle;
  std::optional<sim::PatternSpec> pattern;
  json spec = spec_path.empty() ? json::object() : read_json(spec_path);
  if (!spec.is_object()) throw ConfigError("synth spec must be a JSON object");
  for (auto it = spec.begin(); it != spec.end(); ++it) {
    if (it.key() != "scene" && it.key() != "oracle" && it.key() != "pattern") {
      throw ConfigError("synth spec: unknown key '" + it.key() + "'");
    }
  }
  try {
    if (spec.contains("scene")) {
      const auto& s = spec["scene"];
      scene.layout = synth::parse_layout(s.value("layout", synth::to_string(scene.layout)));
      scene.width = s.value("width", scene.width);
      scene.height = s.value("height", scene.height);
      scene.min_depth = s.value("min_depth", scene.min_depth);
      scene.max_depth = s.value("max_depth", scene.max_depth);
      scene.far_cap = s.value("far_cap", scene.far_cap);
      scene.texture_wavelength = s.value("texture_wavelength", scene.texture_wavelength);
      scene.seed = s.value("seed", scene.seed);
    }
    if (spec.contains("oracle")) {
      const auto& o = spec["oracle"];
      oracle.s_true = o.value("s_true", oracle.s_true);
      oracle.t_true = o.value("t_true", oracle.t_true);
      oracle.bias_amplitude = o.value("bias_amplitude", oracle.bias_amplitude);
      oracle.bias_wavelength = o.value("bias_wavelength", oracle.bias_wavelength);
      oracle.noise_sigma = o.value("noise_sigma", oracle.noise_sigma);
      oracle.seed = o.value("seed", oracle.seed);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synth spec: ") + e.what());
  }
  if (spec.contains("pattern")) pattern = pipeline::pattern_from_json(spec["pattern"]);
  if (g.seed) {
    scene.seed = *g.seed;
    oracle.seed = *g.seed + 1;
    if (pattern) pattern->seed = *g.seed + 2;
  }
  const fs::path dir = out_dir(g);
  const auto sc = synth::generate_scene(scene);
  write_raster(sc.gt, dir / "gt.fdr");
  write_image(sc.guide, dir / "guide.fdr");
  const auto relative = synth::oracle_relative(sc.gt, oracle);
  write_raster(relative, dir / "relative.fdr");
  const auto k = synth::default_intrinsics(scene.width, scene.height);
  json manifest = {
      {"scene",
       {{"layout", synth::to_string(scene.layout)}, {"width", scene.width}, {"height", scene.height},
        {"min_depth", scene.min_depth}, {"max_depth", scene.max_depth}, {"far_cap", scene.far_cap},
        {"texture_wavelength", scene.texture_wavelength}, {"seed", scene.seed}}},
      {"oracle",
       {{"s_true", oracle.s_true}, {"t_true", oracle.t_true}, {"bias_amplitude", oracle.bias_amplitude},
        {"bias_wavelength", oracle.bias_wavelength}, {"noise_sigma", oracle.noise_sigma},
        {"seed", oracle.seed}}},
      {"intrinsics", {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}}},
      {"files", {{"gt", "gt.fdr"}, {"guide", "guide.fdr"}, {"relative", "relative.fdr"}}}};
  if (pattern) {
    const auto res = sim::sample_pattern(sc.gt, *pattern, &sc.guide, k);
    write_points(res.points, dir / "points.csv");
    manifest["pattern"] = pipeline::to_json(*pattern);
    manifest["files"]["points"] = "points.csv";
    manifest["points"] = {{"count", res.points.size()}, {"dropped", res.dropped}};
  }
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  std::printf("wrote %s (%dx%d %s)\n", dir.string().c_str(), scene.width, scene.height,
              synth::to_string(scene.layout).c_str());
  return 0;
}

int cmd_simulate(const Globals& g, const std::string& gt_path, const std::string& pattern_path,
                 const std::string& guide_path, const std::string& intr, const std::string& out) {
  const auto gt = read_raster(gt_path);
  auto spec = pattern_path.empty() ? sim::PatternSpec{} : pipeline::pattern_from_json(read_json(pattern_path));
  if (g.seed) spec.seed = *g.seed;
  std::optional<Image> guide;
  if (!guide_path.empty()) guide = read_image(guide_path);
  std::optional<CameraIntrinsics> k;
  if (!intr.empty()) {
    const auto v = parse_list(intr, 4, "--intrinsics");
    k = CameraIntrinsics{v[0], v[1], v[2], v[3]};
  } else if (spec.kind == sim::PatternKind::kLaser2) {
    k = synth::default_intrinsics(gt.width(), gt.height());
  }
  const auto res = sim::sample_pattern(gt, spec, guide ? &*guide : nullptr, k);
  const fs::path path = out.empty() ? out_dir(g) / "points.csv" : fs::path(out);
  write_points(res.points, path);
  std::printf("%zu points (%zu dropped) -> %s\n", res.points.size(), res.dropped, path.string().c_str());
  return 0;
}

int cmd_align(const Globals& g, const std::string& rel_path, const std::string& pts_path,
              const std::string& laser, const std::string& out, const std::string& report) {
  const auto z = read_raster(rel_path);
  if (z.space() != DepthSpace::kAffine) throw DomainError("align: relative raster must carry the affine tag");
  align::AlignResult res;
  if (!laser.empty()) {
    const auto v = parse_list(laser, 5, "--laser");
    const CameraIntrinsics k{v[0], v[0], v[1], 0.5 * (z.height() - 1)};
    const int row = static_cast<int>(std::lround(k.cy));
    std::vector<SparsePoint> spots;
    for (double u : {v[3], v[4]}) {
      const int col = static_cast<int>(std::lround(u));
      if (!z.contains(col, row) || !z.valid(col, row)) {
        throw DomainError("align: laser spot at column " + std::to_string(col) + " is not on a valid pixel");
      }
      // Depth is not observed for laser spots; carry the scale-free value.
      spots.push_back({u, static_cast<double>(row), 1.0});
    }
    const double s = align::laser_scale({spots[0].u, z.at(spots[0].col(), row)},
                                        {spots[1].u, z.at(spots[1].col(), row)}, k, v[2]);
    res.aligned = align::apply_affine(z, s, 0.0);
    res.fit = {s, 0.0, align::FitMode::kLaserBaseline, 0.0, 2};
  } else {
    if (pts_path.empty()) throw ConfigError("align: --points or --laser is required");
    res = align::align_global(z, read_points(pts_path));
  }
  const fs::path path = out.empty() ? out_dir(g) / "aligned.fdr" : fs::path(out);
  write_raster(res.aligned, path);
  const json j = fit_json(res.fit);
  if (!report.empty()) write_text(report, j.dump(2) + "\n");
  std::printf("%s\n", j.dump().c_str());
  return 0;
}

int cmd_densify(const Globals& g, const std::string& map_path, const std::string& guide_path,
                const densify::JbuParams& p, const std::string& out) {
  const auto eps = read_scale_map(map_path);
  const auto guide = read_raster(guide_path);
  const auto dense = densify::jbu_densify(eps, guide, p);
  const fs::path path = out.empty() ? out_dir(g) / "scale_dense.fdr" : fs::path(out);
  write_scale_map(dense, path);
  std::printf("known %zu, filled %zu of %zu -> %s\n", dense.known_count(), dense.filled_count(),
              dense.size(), path.string().c_str());
  return 0;
}

int cmd_train(const Globals& g) {
  const auto cfg = run_config(g);
  const fs::path dir = out_dir(g);
  pipeline::TrainOptions opt;
  opt.rescue_path = dir / "checkpoint.last_good.spw";
  opt.on_epoch = [](const pipeline::EpochLog& e) {
    std::fprintf(stderr,
                 "epoch %2d  lr %.1e  train %.4f  val %.4f  val MAE %.4f (GA %.4f)  %.1fs\n", e.epoch,
                 e.lr, e.train_loss, e.val_loss, e.val_mae, e.val_ga_mae, e.seconds);
  };
  const auto result = pipeline::train(cfg, opt);
  const json meta = pipeline::checkpoint_metadata(cfg, result.log);
  nn::save_checkpoint(*result.model, dir / "checkpoint.spw", meta.dump());
  write_text(dir / "train_log.json", meta.dump(2) + "\n");
  std::printf("checkpoint %s (%zu parameters, config %s)\n", (dir / "checkpoint.spw").string().c_str(),
              result.model->parameter_count(), pipeline::config_hash(cfg).c_str());
  return 0;
}

int cmd_run(const Globals& g, const std::string& ckpt, const std::string& rel_path,
            const std::string& guide_path, const std::string& pts_path, const std::string& gt_path,
            const std::string& laser) {
  auto lm = load_model(g, ckpt);
  const auto relative = read_raster(rel_path);
  const auto guide = read_image(guide_path);
  const auto points = read_points(pts_path);
  std::optional<DepthRaster> gt;
  if (!gt_path.empty()) gt = read_raster(gt_path);
  std::optional<pipeline::LaserSetup> setup;
  if (!laser.empty()) {
    const auto v = parse_list(laser, 5, "--laser");
    setup = pipeline::LaserSetup{{v[0], v[1], v[2], v[3]}, v[4]};
  }
  const auto r = pipeline::run_frame(*lm.model, relative, guide, points, lm.cfg.jbu,
                                     gt ? &*gt : nullptr, lm.cfg.range_cap, setup);
  const fs::path dir = out_dir(g);
  write_raster(r.refined_depth, dir / "refined.fdr");
  write_raster(r.ga_depth, dir / "ga.fdr");
  ScaleMap corr = ScaleMap::zeros(relative.width(), relative.height());
  corr.values = r.correction;
  write_scale_map(corr, dir / "correction.fdr");
  json j = {{"fit", fit_json(r.fit)}, {"checkpoint", ckpt.empty() ? "neutral" : ckpt}};
  if (r.refined_metrics) j["refined"] = pipeline::to_json(*r.refined_metrics);
  if (r.ga_metrics) j["ga"] = pipeline::to_json(*r.ga_metrics);
  write_text(dir / "run_report.json", j.dump(2) + "\n");
  std::printf("%s\n", j.dump().c_str());
  return 0;
}

pipeline::Split parse_split(const std::string& s) {
  if (s == "test") return pipeline::Split::kTest;
  if (s == "val") return pipeline::Split::kVal;
  if (s == "train") return pipeline::Split::kTrain;
  throw ConfigError("unknown split '" + s + "'");
}

int cmd_eval(const Globals& g, const std::string& ckpt, const std::string& split) {
  auto lm = load_model(g, ckpt);
  const auto frames = pipeline::make_split(lm.cfg, parse_split(split));
  const auto rep = pipeline::evaluate(*lm.model, frames, lm.cfg);
  json j = pipeline::to_json(rep);
  j["config_hash"] = pipeline::config_hash(lm.cfg);
  j["seed"] = lm.cfg.seed;
  j["split"] = split;
  write_text(out_dir(g) / "eval.json", j.dump(2) + "\n");
  print_metrics("refined", rep.refined);
  print_metrics("GA", rep.ga);
  return 0;
}

int cmd_sweep(const Globals& g, const std::string& ckpt, const std::string& spec_path) {
  auto lm = load_model(g, ckpt);
  const auto spec = spec_path.empty() ? pipeline::SweepSpec{} : pipeline::sweep_spec_from_json(read_json(spec_path));
  const auto frames = pipeline::make_split(lm.cfg, pipeline::Split::kTest);
  const auto rep = pipeline::sweep(*lm.model, frames, lm.cfg, spec);
  const fs::path dir = out_dir(g);
  json j = pipeline::to_json(rep);
  j["spec"] = pipeline::to_json(spec);
  j["config_hash"] = pipeline::config_hash(lm.cfg);
  j["seed"] = lm.cfg.seed;
  write_text(dir / "sweep.json", j.dump(2) + "\n");
  write_text(dir / "sweep.csv", pipeline::sweep_csv(rep));
  for (const auto& c : rep.cells) {
    std::printf("%-13s n=%-4d cap=%-5g MAE %.4f  GA %.4f  (%zu frames)\n", sim::to_string(c.pattern).c_str(),
                c.count, c.cap, c.refined.mae, c.ga.mae, c.refined.frame_count);
  }
  return 0;
}

int cmd_gradcheck(const Globals& g, bool faulty) {
  pipeline::GradSuiteOptions opt;
  if (g.seed) opt.seed = *g.seed;
  opt.include_faulty = faulty;
  const auto rep = pipeline::run_gradcheck_suite(opt);
  for (const auto& c : rep.worst_per_family()) {
    std::printf("%-22s max rel err %.3e  %s\n", c.family.c_str(), c.max_rel_error, c.pass ? "ok" : "FAIL");
  }
  std::printf("%zu cases in %.1fs: %s\n", rep.cases.size(), rep.seconds, rep.pass() ? "pass" : "FAIL");
  if (!g.out_dir.empty() && g.out_dir != ".") write_text(out_dir(g) / "gradcheck.json", pipeline::to_json(rep).dump(2) + "\n");
  return rep.pass() ? 0 : kExitNumeric;
}

int cmd_report(const Globals& g, const std::string& ckpt, const std::string& split, double max_error) {
  auto lm = load_model(g, ckpt);
  const auto frames = pipeline::make_split(lm.cfg, parse_split(split));
  const auto rep = pipeline::evaluate(*lm.model, frames, lm.cfg, true);
  pipeline::render_report(rep, frames, out_dir(g), max_error);
  std::printf("%zu frames -> %s\n", rep.frames.size(), g.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-prior monocular depth: global alignment and learned scale refinement"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Run configuration (JSON)");
  app.add_option("--seed", g.seed, "Override the run seed");
  app.add_option("--out-dir", g.out_dir, "Output directory");

  std::string spec, gt, pattern, guide, intr, out, rel, pts, laser, report, map, ckpt, split = "test";
  densify::JbuParams jbu;
  bool faulty = false;
  double max_error = 1.0;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene, oracle output and points");
  synth->add_option("--spec", spec, "Scene/oracle/pattern spec (JSON)");

  auto* simulate = app.add_subcommand("simulate", "Sample a sensor pattern from ground truth");
  simulate->add_option("--gt", gt, "Ground-truth raster (FDR1)")->required();
  simulate->add_option("--pattern", pattern, "Pattern spec (JSON)");
  simulate->add_option("--guide", guide, "Guide image for feature-like sampling (FDR1)");
  simulate->add_option("--intrinsics", intr, "fx,fy,cx,cy");
  simulate->add_option("--out", out, "Output CSV");

  auto* align_cmd = app.add_subcommand("align", "Global scale/shift alignment");
  align_cmd->add_option("--relative", rel, "Relative inverse depth (FDR1, affine tag)")->required();
  align_cmd->add_option("--points", pts, "Sparse points CSV");
  align_cmd->add_option("--laser", laser, "fx,cx,B,u1,u2");
  align_cmd->add_option("--out", out, "Aligned raster (FDR1)");
  align_cmd->add_option("--fit-report", report, "Fit report (JSON)");

  auto* densify_cmd = app.add_subcommand("densify", "Joint bilateral densification of a scale map");
  densify_cmd->add_option("--scale-map", map, "Sparse scale map (FDR1)")->required();
  densify_cmd->add_option("--guide", guide, "Aligned inverse depth guide (FDR1)")->required();
  densify_cmd->add_option("--radius", jbu.window_radius, "Window half-width");
  densify_cmd->add_option("--sigma-s", jbu.sigma_spatial, "Spatial sigma (px)");
  densify_cmd->add_option("--sigma-r", jbu.sigma_range, "Range sigma (inverse depth)");
  densify_cmd->add_option("--out", out, "Output (FDR1)");

  auto* train_cmd = app.add_subcommand("train", "Train the refinement model on synthetic frames");

  auto* run_cmd = app.add_subcommand("run", "Two-stage inference on one frame");
  run_cmd->add_option("--checkpoint", ckpt, "Model checkpoint (neutral model if omitted)");
  run_cmd->add_option("--relative", rel, "Relative inverse depth (FDR1)")->required();
  run_cmd->add_option("--guide", guide, "Guide image (FDR1)")->required();
  run_cmd->add_option("--points", pts, "Sparse points CSV")->required();
  run_cmd->add_option("--gt", gt, "Ground truth for metrics (FDR1)");
  run_cmd->add_option("--laser", laser, "fx,fy,cx,cy,B: treat the two points as laser spots");

  auto* eval_cmd = app.add_subcommand("eval", "Metrics on a synthetic split");
  eval_cmd->add_option("--checkpoint", ckpt, "Model checkpoint (neutral model if omitted)");
  eval_cmd->add_option("--split", split, "train, val or test");

  auto* sweep_cmd = app.add_subcommand("sweep", "Sparsity/pattern/range sweep on the test split");
  sweep_cmd->add_option("--checkpoint", ckpt, "Model checkpoint (neutral model if omitted)");
  sweep_cmd->add_option("--sweep", spec, "Sweep spec (JSON)");

  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  grad_cmd->add_flag("--faulty", faulty, "Include a deliberately wrong backward rule");

  auto* report_cmd = app.add_subcommand("report", "Error maps and metric tables");
  report_cmd->add_option("--checkpoint", ckpt, "Model checkpoint (neutral model if omitted)");
  report_cmd->add_option("--split", split, "train, val or test");
  report_cmd->add_option("--max-error", max_error, "Error (m) mapped to white");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth) return cmd_synth(g, spec);
    if (*simulate) return cmd_simulate(g, gt, pattern, guide, intr, out);
    if (*align_cmd) return cmd_align(g, rel, pts, laser, out, report);
    if (*densify_cmd) return cmd_densify(g, map, guide, jbu, out);
    if (*train_cmd) return cmd_train(g);
    if (*run_cmd) return cmd_run(g, ckpt, rel, guide, pts, gt, laser);
    if (*eval_cmd) return cmd_eval(g, ckpt, split);
    if (*sweep_cmd) return cmd_sweep(g, ckpt, spec);
    if (*grad_cmd) return cmd_gradcheck(g, faulty);
    if (*report_cmd) return cmd_report(g, ckpt, split, max_error);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
