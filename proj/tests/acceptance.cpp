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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "oracles.hpp"
#include "spade/align/alignment.hpp"
#include "spade/core/io.hpp"
#include "spade/core/rng.hpp"
#include "spade/densify/densify.hpp"
#include "spade/loss/loss.hpp"
#include "spade/loss/metrics.hpp"
#include "spade/nn/checkpoint.hpp"
#include "spade/nn/deform_attn.hpp"
#include "spade/pipeline/evaluate.hpp"
#include "spade/pipeline/gradcheck_suite.hpp"
#include "spade/pipeline/report.hpp"
#include "spade/pipeline/train.hpp"
#include "spade/sim/sensor.hpp"
#include "spade/synth/oracle.hpp"
#include "spade/synth/scene.hpp"

namespace fs = std::filesystem;
using namespace spade;
using nn::Tensor;

namespace {

// Pinned tolerances.
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 60;
constexpr double kAffineTol = 1e-9;
constexpr double kScaleOnlyTol = 1e-12;
constexpr double kDenseAttnTol = 1e-10;
constexpr double kJbuTol = 1e-12;
constexpr double kHullSlack = 1e-12;
constexpr double kSilogTol = 1e-9;
constexpr double kTotalTol = 1e-12;
constexpr double kNeutralTol = 1e-12;
constexpr double kTrainSeconds = 15 * 60;
constexpr double kRefinedRatio = 0.8;
constexpr double kSparseRatio = 3.0;
constexpr double kMonotoneSlack = 1.05;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d  %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

void criterion_gradients() {
  const auto rep = pipeline::run_gradcheck_suite({11, 1e-6, kGradTol, 3, false});
  const std::vector<std::string> required{"conv",        "norm",         "activations",   "bilinear_sample",
                                          "cbam",        "deformable_attention", "decoder_block",
                                          "loss_rmse",   "loss_silog",   "loss_grad"};
  std::map<std::string, int> count;
  bool offsets = false, table = false;
  double worst = 0;
  for (const auto& c : rep.cases) {
    ++count[c.family];
    worst = std::max(worst, c.max_rel_error);
    if (c.family == "deformable_attention") {
      for (const auto& t : c.tensors) {
        offsets |= t.find("offset") != std::string::npos;
        table |= t.find("rel_bias") != std::string::npos;
      }
    }
  }
  std::string missing;
  for (const auto& f : required) {
    if (count[f] < 3) missing += " " + f;
  }
  const bool pass = rep.pass() && missing.empty() && offsets && table && rep.seconds <= kGradSeconds;
  report(1, pass,
         fmt("%zu cases over %zu families, worst rel err %.2e (tol %.0e), %.1f s (limit %.0f)%s%s",
             rep.cases.size(), count.size(), worst, kGradTol, rep.seconds, kGradSeconds,
             missing.empty() ? "" : ", missing:", missing.c_str()));
}

void criterion_affine_recovery() {
  Rng rng(201);
  int ok = 0, fallbacks = 0;
  double worst = 0;
  const synth::Layout layouts[] = {synth::Layout::kCanyon, synth::Layout::kSeafloorBumps,
                                   synth::Layout::kFrameWithRopes};
  for (int i = 0; i < 100; ++i) {
    synth::SceneSpec spec;
    spec.layout = layouts[i % 3];
    spec.seed = rng.next();
    const auto scene = synth::generate_scene(spec);
    synth::OracleSpec os;
    os.s_true = rng.uniform(0.5, 2.0);
    os.t_true = rng.uniform(-0.1, 0.1);
    const auto z = synth::oracle_relative(scene.gt, os);
    sim::PatternSpec ps;
    ps.seed = rng.next();
    const auto pts = sim::sample_pattern(scene.gt, ps, &scene.guide).points;
    const auto r = align::align_global(z, pts);
    if (r.fit.mode != align::FitMode::kScaleShift) ++fallbacks;
    const double err = std::max(std::abs(r.fit.scale - os.s_true), std::abs(r.fit.shift - os.t_true));
    worst = std::max(worst, err);
    ok += err <= kAffineTol && r.fit.mode == align::FitMode::kScaleShift;
  }
  report(2, ok == 100, fmt("%d/100 frames recovered, worst |error| %.2e (tol %.0e), %d fallbacks", ok, worst,
                           kAffineTol, fallbacks));
}

void criterion_scale_only_fallback() {
  Rng rng(301);
  int ok = 0;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double z1 = rng.uniform(0.2, 0.9), z2 = z1 + rng.uniform(0.001, 0.02);
    const double v1 = rng.uniform(0.3, 1.5), v2 = v1 - rng.uniform(0.001, 0.05);
    const auto z = DepthRaster::dense(2, 1, DepthSpace::kAffine, {z1, z2});
    const SparsePointSet pts({{0, 0, 1 / v1}, {1, 0, 1 / v2}});
    // slope through the pair is negative by construction
    const bool negative = (v2 - v1) / (z2 - z1) < 0;
    const auto r = align::align_global(z, pts);
    const double want = (z1 * v1 + z2 * v2) / (z1 * z1 + z2 * z2);
    const double err = std::abs(r.fit.scale - want);
    worst = std::max(worst, err);
    ok += negative && r.fit.mode == align::FitMode::kScaleOnly && r.fit.shift == 0.0 && err <= kScaleOnlyTol;
  }
  report(3, ok == 100, fmt("%d/100 fixtures scale_only, worst |s - sum(zv)/sum(z^2)| %.2e (tol %.0e)", ok, worst,
                           kScaleOnlyTol));
}

void criterion_dense_attention() {
  Rng rng(401);
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    nn::DeformAttnConfig cfg;
    cfg.heads = 1 + int(rng.below(3));
    cfg.channels = cfg.heads * (2 + int(rng.below(3)));
    cfg.height = 2 + int(rng.below(4));
    cfg.width = 2 + int(rng.below(4));
    cfg.grid_downsample = 1;
    cfg.offset_kernel = 3;
    nn::DeformableAttention attn(cfg, rng);
    const int c = cfg.channels;
    for (nn::Linear* l : {&attn.query(), &attn.key(), &attn.value(), &attn.output()}) {
      auto& w = l->weight().mutable_data();
      std::fill(w.begin(), w.end(), 0.0);
      for (int k = 0; k < c; ++k) w[k * c + k] = 1.0;
      std::fill(l->bias().mutable_data().begin(), l->bias().mutable_data().end(), 0.0);
    }
    for (Tensor* t : {&attn.offset_pointwise().weight(), &attn.offset_pointwise().bias(), &attn.bias_table()}) {
      std::fill(t->mutable_data().begin(), t->mutable_data().end(), 0.0);
    }
    const int len = cfg.height * cfg.width;
    std::vector<double> x(std::size_t(len) * c);
    for (double& v : x) v = rng.uniform(-2, 2);
    const Tensor y = attn.forward(Tensor::from({1, len, c}, x));
    const auto ref = oracle::dense_attention(x, len, c, cfg.heads);
    for (std::size_t k = 0; k < ref.size(); ++k) worst = std::max(worst, std::abs(y.data()[k] - ref[k]));
  }
  report(4, worst <= kDenseAttnTol, fmt("10 inputs, max |deformable - dense| %.2e (tol %.0e)", worst, kDenseAttnTol));
}

void criterion_jbu() {
  Rng rng(501);
  double worst = 0;
  int windows = 0, inside = 0;
  for (int i = 0; i < 25; ++i) {
    const int w = 5 + int(rng.below(12)), h = 5 + int(rng.below(12));
    const densify::JbuParams p{1 + int(rng.below(5)), rng.uniform(0.7, 4.0), rng.uniform(0.03, 0.4)};
    ScaleMap eps = ScaleMap::zeros(w, h);
    std::vector<int> known(eps.size(), 0);
    std::vector<double> g(eps.size());
    for (std::size_t k = 0; k < eps.size(); ++k) {
      g[k] = rng.uniform(0.1, 1.2);
      if (rng.uniform() < 0.12) {
        eps.values[k] = rng.uniform(0.6, 1.6);
        eps.known[k] = known[k] = 1;
      }
    }
    const auto out = densify::jbu_filter(eps, DepthRaster::dense(w, h, DepthSpace::kInverse, g), p);
    const auto ref = oracle::jbu(w, h, eps.values, known, g, p.window_radius, p.sigma_spatial, p.sigma_range);
    for (std::size_t k = 0; k < ref.size(); ++k) worst = std::max(worst, std::abs(out.values[k] - ref[k]));
    // hull bound on 40 random windows per fixture
    for (int s = 0; s < 40; ++s) {
      const int u = int(rng.below(std::uint64_t(w))), v = int(rng.below(std::uint64_t(h)));
      double lo = 1e300, hi = -1e300;
      for (int y = std::max(0, v - p.window_radius); y <= std::min(h - 1, v + p.window_radius); ++y) {
        for (int x = std::max(0, u - p.window_radius); x <= std::min(w - 1, u + p.window_radius); ++x) {
          if (!known[y * w + x]) continue;
          lo = std::min(lo, eps.values[y * w + x]);
          hi = std::max(hi, eps.values[y * w + x]);
        }
      }
      ++windows;
      const double val = out.at(u, v);
      const bool filled = out.filled[out.index(u, v)];
      if (lo > hi) {
        inside += !filled && val == 0.0;
      } else {
        inside += filled && val >= lo - kHullSlack && val <= hi + kHullSlack;
      }
    }
  }
  report(5, worst <= kJbuTol && inside == windows && windows >= 1000,
         fmt("25 fixtures, max |jbu - brute force| %.2e (tol %.0e); hull bound holds on %d/%d windows", worst,
             kJbuTol, inside, windows));
}

void criterion_identities() {
  Rng rng(601);
  const int h = 12, w = 16;
  std::vector<double> z(h * w), p(h * w), m(h * w);
  for (int i = 0; i < h * w; ++i) {
    z[i] = rng.uniform(0.1, 1.5);
    p[i] = rng.uniform(0.1, 1.5);
    m[i] = rng.uniform() < 0.85;
  }
  auto t = [&](const std::vector<double>& v) { return Tensor::from({1, 1, h, w}, v); };
  std::vector<double> ez(z);
  for (double& v : ez) v *= std::exp(1.0);
  const double same = loss::loss_silog(t(z), t(z), t(m)).item();
  const double shifted = loss::loss_silog(t(ez), t(z), t(m)).item();
  double inv = 0;
  std::vector<double> gt(h * w);
  for (int i = 0; i < h * w; ++i) gt[i] = 1.0 / z[i];
  const auto gtr = DepthRaster::dense(w, h, DepthSpace::kMetric, gt);
  const auto pr = DepthRaster::dense(w, h, DepthSpace::kMetric, [&] {
    std::vector<double> v(h * w);
    for (int i = 0; i < h * w; ++i) v[i] = 1.0 / p[i];
    return v;
  }());
  const double base = loss::frame_metrics(pr, gtr, 100.0)->silog;
  for (double c : {0.5, 2.0, 10.0}) {
    std::vector<double> v(pr.values());
    for (double& x : v) x *= c;
    inv = std::max(inv, std::abs(loss::frame_metrics(DepthRaster::dense(w, h, DepthSpace::kMetric, v), gtr, 100.0)
                                     ->silog -
                                 base));
  }
  const auto r = loss::loss_total(t(p), t(z), t(m));
  const double total_err = std::abs(r.total - (r.rmse_loss + r.silog_loss + 0.5 * r.grad_loss));
  const bool pass = same == 0.0 && std::abs(shifted - 10 * std::sqrt(0.15)) <= kSilogTol && inv <= kSilogTol &&
                    total_err <= kTotalTol;
  report(6, pass,
         fmt("SiLog(z,z)=%.1e; |SiLog(e*z,z) - 10*sqrt(0.15)|=%.1e; SILog metric drift over c=0.5,2,10: %.1e; "
             "|total - parts|=%.1e",
             same, std::abs(shifted - 10 * std::sqrt(0.15)), inv, total_err));
}

void criterion_neutral(const fs::path& dir) {
  pipeline::RunConfig cfg;
  auto fresh = pipeline::make_model(cfg);
  nn::save_checkpoint(*fresh, dir / "neutral.spw", pipeline::checkpoint_metadata(cfg, {}).dump());
  auto model = pipeline::make_model(cfg);
  nn::load_checkpoint(*model, dir / "neutral.spw");
  model->set_training(false);
  const auto frames = pipeline::make_split(cfg, pipeline::Split::kTest);
  const auto rep = pipeline::evaluate(*model, frames, cfg, true);
  double worst = 0;
  int compared = 0;
  for (const auto& f : rep.frames) {
    if (!f.refined_depth || !f.ga_depth) continue;
    ++compared;
    for (std::size_t i = 0; i < f.ga_depth->size(); ++i) {
      if (f.ga_depth->mask()[i] != f.refined_depth->mask()[i]) worst = 1e300;
      if (f.ga_depth->mask()[i]) {
        worst = std::max(worst, std::abs(f.ga_depth->values()[i] - f.refined_depth->values()[i]));
      }
    }
  }
  report(7, compared == int(frames.size()) && worst <= kNeutralTol,
         fmt("%d frames, max |refined - GA| %.2e m (tol %.0e)", compared, worst, kNeutralTol));
}

pipeline::TrainResult train_desk(const pipeline::RunConfig& cfg, double* seconds) {
  const auto start = std::chrono::steady_clock::now();
  pipeline::TrainOptions opt;
  opt.on_epoch = [](const pipeline::EpochLog& e) {
    std::fprintf(stderr, "  epoch %2d  train %.4f  val MAE %.4f (GA %.4f)  %.1fs\n", e.epoch, e.train_loss,
                 e.val_mae, e.val_ga_mae, e.seconds);
  };
  auto r = pipeline::train(cfg, opt);
  *seconds = seconds_since(start);
  return r;
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_text(e.path());
  return out;
}

}  // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / "spade_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  criterion_gradients();
  criterion_affine_recovery();
  criterion_scale_only_fallback();
  criterion_dense_attention();
  criterion_jbu();
  criterion_identities();
  criterion_neutral(dir);

  pipeline::RunConfig cfg;  // desk configuration, bias amplitude 0.2
  double train_s = 0;
  auto first = train_desk(cfg, &train_s);
  first.model->set_training(false);
  const auto test = pipeline::make_split(cfg, pipeline::Split::kTest);
  const auto eval = pipeline::evaluate(*first.model, test, cfg);
  const double ratio = eval.refined.mae / eval.ga.mae;
  report(8,
         train_s <= kTrainSeconds && eval.refined.frame_count >= 20 && ratio <= kRefinedRatio &&
             cfg.data.bias_amplitude == 0.2,
         fmt("trained in %.0f s (limit %.0f); %zu held-out frames: refined MAE %.4f m, GA MAE %.4f m, ratio %.3f "
             "(limit %.2f)",
             train_s, kTrainSeconds, eval.refined.frame_count, eval.refined.mae, eval.ga.mae, ratio, kRefinedRatio));

  pipeline::SweepSpec spec;
  spec.counts = {200, 100, 50, 10};
  const auto sw = pipeline::sweep(*first.model, test, cfg, spec);
  std::map<int, double> mae;
  for (const auto& c : sw.cells) mae[c.count] = c.refined.mae;
  const bool ratio_ok = mae[10] <= kSparseRatio * mae[200];
  const bool mono = mae[50] <= kMonotoneSlack * mae[10] && mae[100] <= kMonotoneSlack * mae[50] &&
                    mae[200] <= kMonotoneSlack * mae[100];
  report(9, ratio_ok && mono,
         fmt("refined MAE at 10/50/100/200 points: %.4f / %.4f / %.4f / %.4f m; MAE10/MAE200 = %.2f (limit %.1f); "
             "non-increasing within %.0f%%: %s",
             mae[10], mae[50], mae[100], mae[200], mae[10] / mae[200], kSparseRatio, (kMonotoneSlack - 1) * 100,
             mono ? "yes" : "no"));

  // Second run with the same seed and a different worker count.
  setenv("SPADE_THREADS", "3", 1);
  double again_s = 0;
  auto second = train_desk(cfg, &again_s);
  second.model->set_training(false);
  const auto meta1 = pipeline::checkpoint_metadata(cfg, first.log).dump();
  const auto meta2 = pipeline::checkpoint_metadata(cfg, second.log).dump();
  const bool same_ckpt = nn::encode_checkpoint(*first.model, meta1) == nn::encode_checkpoint(*second.model, meta2);
  const auto sw2 = pipeline::sweep(*second.model, test, cfg, spec);
  const bool same_sweep = pipeline::to_json(sw).dump() == pipeline::to_json(sw2).dump() &&
                          pipeline::sweep_csv(sw) == pipeline::sweep_csv(sw2);
  const auto rep1 = pipeline::evaluate(*first.model, test, cfg, true);
  const auto rep2 = pipeline::evaluate(*second.model, test, cfg, true);
  pipeline::render_report(rep1, test, dir / "report_a");
  pipeline::render_report(rep2, test, dir / "report_b");
  const auto files_a = directory_bytes(dir / "report_a");
  const bool same_report = files_a == directory_bytes(dir / "report_b");
  report(10, same_ckpt && same_sweep && same_report,
         fmt("checkpoints %s, sweeps %s, reports %s (%zu files); second run used 3 workers",
             same_ckpt ? "identical" : "DIFFER", same_sweep ? "identical" : "DIFFER",
             same_report ? "identical" : "DIFFER", files_a.size()));

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
